#include <cmath>

#include "doctest.h"
#include "revuz/measure.hpp"
#include "support.hpp"

using namespace revuz;

namespace {

Chain make_c2() {
  Matrix q(2, 2);
  q << -1.0, 1.0, 1.0, -1.0;
  Vector m(2);
  m << 0.5, 0.5;
  return Chain({"a", "b"}, m, q);
}

}  // namespace

TEST_CASE("measure construction and density") {
  const Chain c2 = make_c2();
  const MeasureVec point = dirac(c2, 0);
  CHECK(point.total_mass() == 1.0);
  CHECK(support(point) == std::vector<Index>{0});

  const Vector f = density(c2, point);
  CHECK(f(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f(1) == 0.0);

  Vector bad(2);
  bad << 1.0, -0.5;
  CHECK_THROWS_AS(make_measure(c2, bad), NegativeMass);
  CHECK_THROWS_AS(dirac(c2, 7), InvalidSubset);
  CHECK_THROWS_AS(dirac(c2, 0, -1.0), NegativeMass);
}

TEST_CASE("potential of a point mass matches the closed form and a LU oracle") {
  const Chain c2 = make_c2();
  const MeasureVec point = dirac(c2, 0);
  const PotentialVec u = potential(c2, 1.0, point);
  CHECK(u.values(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(u.values(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const Chain chain = testsupport::random_chain(seed, 2, 25, seed % 2 == 0);
    Rng rng(derive_stream(seed, {7}));
    const MeasureVec mu =
        testsupport::random_sparse_measure(chain, rng, chain.size());
    const double alpha = 0.3 + 2.0 * rng.uniform();
    const PotentialVec u_spec = potential(chain, alpha, mu);
    const Vector u_lu = testsupport::lu_potential(chain, alpha, mu);
    CHECK((u_spec.values - u_lu).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("zero-potential needs killing") {
  const Chain c2 = make_c2();
  CHECK_THROWS_AS(potential(c2, 0.0, dirac(c2, 0)),
                  ZeroAlphaOnConservativeChain);
  const Chain killed = kill_transform(c2, 1.0);
  const PotentialVec u0 = potential(killed, 0.0, dirac(killed, 0));
  CHECK(u0.values(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("restrict_measure zeroes the complement") {
  const Chain line = path(5);
  const MeasureVec mu = make_measure(line, Vector(Vector::Ones(5)));
  const MeasureVec cut = restrict_measure(mu, {1, 2});
  CHECK(cut.weights(0) == 0.0);
  CHECK(cut.weights(1) == 1.0);
  CHECK(cut.weights(2) == 1.0);
  CHECK(cut.total_mass() == 2.0);
  CHECK_THROWS_AS(restrict_measure(mu, {9}), InvalidSubset);
}

TEST_CASE("potential gap equals the restricted norm on point masses") {
  const Chain c2 = make_c2();
  const PotentialGap gap =
      potential_gap(c2, 1.0, dirac(c2, 0), dirac(c2, 1));
  CHECK(gap.sup_norm == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(gap.ess_sup_norm == doctest::Approx(gap.sup_norm).epsilon(1e-14));
  CHECK_THROWS_AS(potential_gap(c2, -1.0, dirac(c2, 0), dirac(c2, 1)),
                  NegativeAlpha);
}

TEST_CASE("maximum principle on random sparse measures") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const Chain chain = testsupport::random_chain(seed, 6, 30, seed % 3 == 0);
    Rng rng(derive_stream(seed, {11}));
    const Index half = chain.size() / 2;
    const MeasureVec mu =
        testsupport::random_sparse_measure(chain, rng, half);
    const MeasureVec nu =
        testsupport::random_sparse_measure(chain, rng, half);
    const double alpha = 0.2 + 3.0 * rng.uniform();
    const PotentialGap gap = potential_gap(chain, alpha, mu, nu);
    CHECK(std::abs(gap.sup_norm - gap.ess_sup_norm) < 1e-10);
  }
}

TEST_CASE("short-time energy: closed form, monotonicity, decay") {
  const Chain c2 = make_c2();
  const MeasureVec point = dirac(c2, 0);
  const std::vector<Index> full{0, 1};

  const auto closed = [](double delta) {
    return delta + 0.5 * (1.0 - std::exp(-2.0 * delta));
  };
  for (double delta : {0.25, 0.5, 1.0}) {
    CHECK(short_time_energy(c2, point, full, delta) ==
          doctest::Approx(closed(delta)).epsilon(1e-13));
  }
  CHECK(short_time_energy(c2, point, full, 0.5) >
        short_time_energy(c2, point, full, 0.25));
  CHECK(short_time_energy(c2, point, full, 1e-8) < 1e-7);
  CHECK(short_time_energy(c2, zero_measure(c2), full, 0.5) == 0.0);
  CHECK_THROWS_AS(short_time_energy(c2, point, full, 0.0), NonpositiveTime);
}

TEST_CASE("energy integral of a point mass") {
  const Chain c2 = make_c2();
  CHECK(energy_integral(c2, dirac(c2, 0)) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("mollified dirac family") {
  const Chain line = path(9);
  const auto family = mollified_dirac(line, 4, {5, 3, 1});
  REQUIRE(family.size() == 3);
  for (const auto& mu : family) {
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(family[0].weights(2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(family[1].weights(2) == 0.0);
  CHECK(family[2].weights(4) == 1.0);

  // window clipped at the edge keeps unit mass
  const auto edge = mollified_dirac(line, 0, {5});
  CHECK(edge[0].total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(edge[0].weights(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(mollified_dirac(line, 4, {4}), BadParameter);
  CHECK_THROWS_AS(mollified_dirac(line, 40, {3}), InvalidSubset);
}

TEST_CASE("scaled and perturbed families") {
  const Chain line = path(9);
  const MeasureVec mu = make_measure(line, line.m());

  const auto sc = scaled(mu, {2.0, 1.0, 0.5});
  CHECK(sc[0].total_mass() == doctest::Approx(18.0).epsilon(1e-14));
  CHECK(sc[2].total_mass() == doctest::Approx(4.5).epsilon(1e-14));
  CHECK_THROWS_AS(scaled(mu, {-1.0}), NegativeMass);

  const auto pa = perturbed(mu, 42, 4);
  const auto pb = perturbed(mu, 42, 4);
  REQUIRE(pa.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK((pa[k].weights - pb[k].weights).cwiseAbs().maxCoeff() == 0.0);
    // jitter of member k stays within 1/(2(k+2)) relatively
    const Vector rel =
        ((pa[k].weights - mu.weights).array() / mu.weights.array()).matrix();
    CHECK(rel.cwiseAbs().maxCoeff() <= 0.5 / (k + 2.0) + 1e-15);
    CHECK(rel.cwiseAbs().maxCoeff() > 0.0);
  }
  CHECK_THROWS_AS(perturbed(mu, 42, 0), BadParameter);
}
