#include <cmath>
#include <limits>

#include "doctest.h"
#include "revuz/path.hpp"
#include "revuz/pcaf.hpp"
#include "support.hpp"

using namespace revuz;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Chain make_c2() {
  Matrix q(2, 2);
  q << -1.0, 1.0, 1.0, -1.0;
  Vector m(2);
  m << 0.5, 0.5;
  return Chain({"a", "b"}, m, q);
}

// One state, no jumps, unit killing rate: the lifetime is Exp(1) exactly.
Chain make_killing_site() {
  Matrix q(1, 1);
  q << -1.0;
  Vector m(1);
  m << 1.0;
  return Chain({"o"}, m, q);
}

}  // namespace

TEST_CASE("sample_path is deterministic in the seed") {
  const Chain c2 = make_c2();
  const PathRecord a = sample_path(c2, 0, 20.0, 77);
  const PathRecord b = sample_path(c2, 0, 20.0, 77);
  CHECK(a.jump_times == b.jump_times);
  CHECK(a.states == b.states);
  CHECK(a.lifetime == b.lifetime);

  const PathRecord c = sample_path(c2, 0, 20.0, 78);
  REQUIRE(!a.jump_times.empty());
  REQUIRE(!c.jump_times.empty());
  CHECK(a.jump_times[0] != c.jump_times[0]);
}

TEST_CASE("sample_path argument guards") {
  const Chain c2 = make_c2();
  CHECK_THROWS_AS(sample_path(c2, 0, 0.0, 1), NonpositiveTime);
  CHECK_THROWS_AS(sample_path(c2, 5, 1.0, 1), InvalidSubset);
  CHECK_THROWS_AS(sample_path(c2, 0, kInf, 1), ConservativeChain);
}

TEST_CASE("structure of sampled trajectories") {
  const Chain c2 = make_c2();
  const Chain killed = kill_transform(c2, 1.0);
  int seen_killed = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const PathRecord p = sample_path(killed, 0, 2.0, seed);
    double prev = 0.0;
    for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
      CHECK(p.jump_times[i] > prev);
      CHECK(p.jump_times[i] < p.end_time());
      CHECK(p.states[i] == (i % 2 == 0 ? 1 : 0));
      prev = p.jump_times[i];
    }
    if (p.killed()) {
      ++seen_killed;
      CHECK(p.lifetime < p.horizon);
    } else {
      CHECK(p.end_time() == 2.0);
    }
  }
  // unit killing everywhere: survival to t = 2 has probability e^{-2}, so
  // about 173 of the 200 runs die first
  CHECK(seen_killed > 150);
  CHECK(seen_killed < 195);
}

TEST_CASE("state_at walks the jump sequence") {
  const Chain c2 = make_c2();
  const PathRecord p = sample_path(c2, 0, 30.0, 5);
  REQUIRE(p.jump_times.size() >= 2);
  CHECK(p.state_at(0.0) == 0);
  CHECK(p.state_at(p.jump_times[0] * 0.5) == 0);
  CHECK(p.state_at(p.jump_times[0]) == 1);
  CHECK(p.state_at(p.jump_times[1]) == 0);
}

TEST_CASE("pure-killing site has an Exp(1) lifetime") {
  const Chain site = make_killing_site();
  const int n = 20000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    const PathRecord p =
        sample_path(site, 0, kInf, derive_stream(404, {std::uint64_t(k)}));
    REQUIRE(p.killed());
    CHECK(p.jump_times.empty());
    sum += p.lifetime;
    sumsq += p.lifetime * p.lifetime;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  const double sem = std::sqrt(var / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * sem);
}

TEST_CASE("exit_time against masks") {
  const Chain line = path(5);
  const PathRecord p = sample_path(line, 2, 40.0, 9);
  REQUIRE(!p.jump_times.empty());

  CHECK(exit_time(p, subset_mask(line, {2})) == p.jump_times[0]);
  CHECK(exit_time(p, subset_mask(line, {0, 1, 2, 3, 4})) == kInf);
  CHECK(exit_time(p, subset_mask(line, {0})) == 0.0);
  CHECK_THROWS_AS(subset_mask(line, {7}), InvalidSubset);

  const Chain site = make_killing_site();
  const PathRecord q = sample_path(site, 0, kInf, 11);
  CHECK(exit_time(q, subset_mask(site, {0})) == q.lifetime);
}

TEST_CASE("unit density accumulates elapsed time") {
  const Chain c2 = make_c2();
  const PathRecord p = sample_path(c2, 0, 8.0, 13);
  const PCAFSeries a = pcaf_along(p, Vector::Ones(2));
  CHECK(a.final_value() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(evaluate(a, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(evaluate(a, 9.0) == a.final_value());
  CHECK_THROWS_AS(evaluate(a, -0.1), NonpositiveTime);
  CHECK_THROWS_AS(pcaf_along(p, Vector::Constant(2, -1.0)), NegativeDensity);
}

TEST_CASE("killed paths extend flat to the horizon") {
  const Chain site = make_killing_site();
  const PathRecord p = sample_path(site, 0, 10.0, 21);
  REQUIRE(p.killed());
  const PCAFSeries a = pcaf_along(p, Vector::Ones(1));
  CHECK(a.breakpoints.back() == 10.0);
  CHECK(a.final_value() == p.lifetime);
  CHECK(evaluate(a, 10.0) == p.lifetime);

  PathRecord unbounded;
  unbounded.start = 0;
  unbounded.horizon = kInf;
  CHECK_THROWS_AS(pcaf_along(unbounded, Vector::Ones(1)), BadParameter);
}

TEST_CASE("restricted accumulation only counts time inside the window") {
  const Chain c2 = make_c2();
  const PathRecord p = sample_path(c2, 0, 8.0, 17);
  const Vector ones = Vector::Ones(2);
  const PCAFSeries inside = pcaf_restricted(p, ones, subset_mask(c2, {0}));

  double direct = 0.0;
  double prev = 0.0;
  Index cur = p.start;
  for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
    if (cur == 0) direct += p.jump_times[i] - prev;
    prev = p.jump_times[i];
    cur = p.states[i];
  }
  if (cur == 0) direct += p.end_time() - prev;
  CHECK(inside.final_value() == doctest::Approx(direct).epsilon(1e-13));

  const PCAFSeries full = pcaf_restricted(p, ones, subset_mask(c2, {0, 1}));
  const PCAFSeries plain = pcaf_along(p, ones);
  CHECK(full.values == plain.values);
}

TEST_CASE("sup_diff of coupled series") {
  const Chain c2 = make_c2();
  const PathRecord p = sample_path(c2, 0, 8.0, 29);
  const PCAFSeries a = pcaf_along(p, Vector::Ones(2));
  const PCAFSeries b = pcaf_along(p, Vector::Zero(2));
  CHECK(sup_diff(a, a, 4.0) == 0.0);
  CHECK(sup_diff(a, b, 4.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK_THROWS_AS(sup_diff(a, b, 0.0), NonpositiveTime);
  CHECK_THROWS_AS(sup_diff(a, b, 9.0), TimeBeyondHorizon);

  const PathRecord other = sample_path(c2, 0, 8.0, 30);
  const PCAFSeries c = pcaf_along(other, Vector::Ones(2));
  CHECK_THROWS_AS(sup_diff(a, c, 4.0), MismatchedPaths);
}

TEST_CASE("rng primitives") {
  Rng a(123);
  Rng b(123);
  for (int k = 0; k < 5; ++k) CHECK(a.uniform() == b.uniform());

  Rng c(124);
  for (int k = 0; k < 1000; ++k) {
    const double u = c.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS_AS(c.exponential(0.0), BadParameter);
  CHECK_THROWS_AS(c.exponential(-1.0), BadParameter);

  CHECK(derive_stream(5, {1}) != derive_stream(5, {2}));
  CHECK(derive_stream(5, {1}) != derive_stream(6, {1}));
  CHECK(derive_stream(5, {1}) != derive_stream(5, {1, 1}));
  CHECK(derive_stream(5, {1, 2}) != derive_stream(5, {2, 1}));
}
