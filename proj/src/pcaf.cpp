#include "revuz/pcaf.hpp"

#include <algorithm>
#include <cmath>

namespace revuz {

namespace {

PCAFSeries accumulate(const PathRecord& path, const Vector& f,
                      const std::vector<bool>* mask) {
  const auto slope_at = [&](Index s) {
    const double v = f(s);
    if (mask != nullptr && !(*mask)[static_cast<std::size_t>(s)]) return 0.0;
    return v;
  };

  for (Index x = 0; x < f.size(); ++x) {
    if (f(x) < 0.0) throw NegativeDensity("PCAF density must be >= 0");
  }

  PCAFSeries out;
  out.horizon = path.horizon;
  out.breakpoints.reserve(path.jump_times.size() + 3);
  out.values.reserve(path.jump_times.size() + 3);
  out.breakpoints.push_back(0.0);
  out.values.push_back(0.0);

  double a = 0.0;
  double prev_t = 0.0;
  Index cur = path.start;
  for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
    const double t = path.jump_times[i];
    a += slope_at(cur) * (t - prev_t);
    out.breakpoints.push_back(t);
    out.values.push_back(a);
    prev_t = t;
    cur = path.states[i];
  }

  const double end = path.end_time();
  if (std::isinf(end)) {
    throw BadParameter("cannot accumulate a PCAF to an infinite horizon");
  }
  if (end > prev_t) {
    a += slope_at(cur) * (end - prev_t);
    out.breakpoints.push_back(end);
    out.values.push_back(a);
  }
  // Constancy after the lifetime: extend flat to a finite horizon.
  if (path.killed() && std::isfinite(path.horizon) &&
      path.horizon > out.breakpoints.back()) {
    out.breakpoints.push_back(path.horizon);
    out.values.push_back(a);
  }
  return out;
}

}  // namespace

PCAFSeries pcaf_along(const PathRecord& path, const Vector& f) {
  return accumulate(path, f, nullptr);
}

PCAFSeries pcaf_restricted(const PathRecord& path, const Vector& f,
                           const std::vector<bool>& in_e) {
  return accumulate(path, f, &in_e);
}

double evaluate(const PCAFSeries& series, double t) {
  if (t < 0.0) throw NonpositiveTime("PCAF evaluation needs t >= 0");
  const auto& bp = series.breakpoints;
  if (bp.empty()) return 0.0;
  if (t >= bp.back()) return series.values.back();
  const auto it = std::upper_bound(bp.begin(), bp.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - bp.begin());
  const std::size_t lo = hi - 1;
  const double span = bp[hi] - bp[lo];
  if (span <= 0.0) return series.values[hi];
  const double w = (t - bp[lo]) / span;
  return series.values[lo] + w * (series.values[hi] - series.values[lo]);
}

double sup_diff(const PCAFSeries& a, const PCAFSeries& b, double t_max) {
  if (!(t_max > 0.0)) throw NonpositiveTime("sup_diff needs T > 0");
  if (a.breakpoints != b.breakpoints) {
    throw MismatchedPaths("sup_diff needs PCAFs built along the same path");
  }
  if (t_max > a.horizon) {
    throw TimeBeyondHorizon("sup_diff window exceeds the path horizon");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < a.breakpoints.size(); ++i) {
    if (a.breakpoints[i] > t_max) break;
    best = std::max(best, std::abs(a.values[i] - b.values[i]));
  }
  best = std::max(best, std::abs(evaluate(a, t_max) - evaluate(b, t_max)));
  return best;
}

}  // namespace revuz
