#pragma once

#include <vector>

#include "revuz/path.hpp"
#include "revuz/types.hpp"

namespace revuz {

// Piecewise-linear additive functional t -> A_t along one path: breakpoints
// are 0, the jump times, the stopping time min(lifetime, horizon), and (for
// killed paths with a finite horizon) the horizon itself, where the series
// continues flat. A_0 = 0; nondecreasing; continuous.
struct PCAFSeries {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double horizon = 0.0;

  double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

// A_t = int_0^t f(X_s) ds with f = d mu / d m >= 0; exact per-sojourn
// accumulation, no time discretization.
PCAFSeries pcaf_along(const PathRecord& path, const Vector& f);

// Slope f(state) * 1_E(state); identical to pcaf_along with the masked
// density.
PCAFSeries pcaf_restricted(const PathRecord& path, const Vector& f,
                           const std::vector<bool>& in_e);

// Value at t by linear interpolation; constant after the last breakpoint.
double evaluate(const PCAFSeries& series, double t);

// Exact sup_{0 <= t <= T} |A_t - B_t| for two series built along the same
// path. A - B is piecewise linear, so the sup is attained at a breakpoint
// or at T.
double sup_diff(const PCAFSeries& a, const PCAFSeries& b, double t_max);

}  // namespace revuz
