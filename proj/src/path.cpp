#include "revuz/path.hpp"

namespace revuz {

Index PathRecord::state_at(double t) const {
  Index cur = start;
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    if (jump_times[i] > t) break;
    cur = states[i];
  }
  return cur;
}

PathRecord sample_path(const Chain& chain, Index x, double horizon,
                       std::uint64_t seed) {
  if (!(horizon > 0.0)) throw NonpositiveTime("sample_path needs horizon > 0");
  if (x < 0 || x >= chain.size()) throw InvalidSubset("start state out of range");
  if (std::isinf(horizon) && !chain.strictly_sub_markov()) {
    throw ConservativeChain(
        "infinite horizon needs strictly positive killing");
  }

  Rng rng(seed);
  PathRecord out;
  out.start = x;
  out.horizon = horizon;
  out.seed = seed;

  const Matrix& q = chain.generator();
  const Vector& kill = chain.killing();
  const Index n = chain.size();

  double t = 0.0;
  Index cur = x;
  while (true) {
    const double total_rate = -q(cur, cur);
    if (!(total_rate > 0.0)) break;  // absorbing state, survives forever
    const double dt = rng.exponential(total_rate);
    if (t + dt >= horizon) break;
    t += dt;

    const double u = rng.uniform() * total_rate;
    double cum = 0.0;
    Index target = -1;
    for (Index y = 0; y < n; ++y) {
      if (y == cur || q(cur, y) <= 0.0) continue;
      cum += q(cur, y);
      if (u < cum) {
        target = y;
        break;
      }
      target = y;  // fp edge: remember the last admissible jump target
    }
    if (u >= cum && kill(cur) > 0.0) {
      out.lifetime = t;
      break;
    }
    if (target < 0) {  // pure-killing state with the draw inside the jump mass
      out.lifetime = t;
      break;
    }
    out.jump_times.push_back(t);
    out.states.push_back(target);
    cur = target;
  }
  return out;
}

std::vector<bool> subset_mask(const Chain& chain,
                              const std::vector<Index>& e) {
  std::vector<bool> mask(static_cast<std::size_t>(chain.size()), false);
  for (Index x : canonical_subset(chain, e)) {
    mask[static_cast<std::size_t>(x)] = true;
  }
  return mask;
}

double exit_time(const PathRecord& path, const std::vector<bool>& in_e) {
  const auto inside = [&](Index s) {
    return in_e[static_cast<std::size_t>(s)];
  };
  if (!inside(path.start)) return 0.0;
  for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
    if (!inside(path.states[i])) return path.jump_times[i];
  }
  if (path.killed()) return path.lifetime;
  return std::numeric_limits<double>::infinity();
}

}  // namespace revuz
