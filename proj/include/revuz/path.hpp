#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/rng.hpp"
#include "revuz/types.hpp"

namespace revuz {

// One sampled trajectory. states[i] is the state entered at jump_times[i];
// the walk starts in `start` at time 0. A finite `lifetime` means the path
// was killed at that instant; +inf means it survived to `horizon`. No jumps
// are recorded at or after min(lifetime, horizon).
struct PathRecord {
  Index start = 0;
  std::vector<double> jump_times;
  std::vector<Index> states;
  double lifetime = std::numeric_limits<double>::infinity();
  double horizon = 0.0;
  std::uint64_t seed = 0;

  bool killed() const { return std::isfinite(lifetime); }

  // Time the trajectory stops accumulating: the kill time if killed, the
  // horizon otherwise (may be +inf for a surviving path with infinite
  // horizon, which only absorbing states can produce).
  double end_time() const { return killed() ? lifetime : horizon; }

  Index state_at(double t) const;
};

// Gillespie sampling: exponential holding at rate -Q(x,x), jump to y with
// probability Q(x,y)/(-Q(x,x)), killing consumes the row deficit.
// Deterministic given the seed. An infinite horizon is admissible only when
// every visited state has an exit (killing or absorption ends the loop).
PathRecord sample_path(const Chain& chain, Index x, double horizon,
                       std::uint64_t seed);

// First time the path is outside E (kill time counts as leaving the space);
// +inf if it never leaves before end_time().
double exit_time(const PathRecord& path, const std::vector<bool>& in_e);

std::vector<bool> subset_mask(const Chain& chain, const std::vector<Index>& e);

}  // namespace revuz
