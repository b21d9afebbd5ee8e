#include <cmath>

#include "doctest.h"
#include "revuz/chain.hpp"
#include "revuz/kernels.hpp"
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

Chain make_c2_killed() {
  Matrix q(2, 2);
  q << -2.0, 1.0, 1.0, -2.0;
  Vector m(2);
  m << 0.5, 0.5;
  return Chain({"a", "b"}, m, q);
}

}  // namespace

TEST_CASE("two-state chain: spectrum, kernels, resolvent against closed forms") {
  const Chain c2 = make_c2();
  CHECK(c2.size() == 2);
  CHECK(c2.conservative());
  CHECK_FALSE(c2.strictly_sub_markov());
  CHECK(c2.spectral().eigenvalues(0) == 0.0);
  CHECK(c2.spectral().eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));

  const auto heat = heat_kernel(c2, 1.0);
  CHECK(heat.values(0, 0) ==
        doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-14));
  CHECK(heat.values(0, 1) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));

  const auto res = resolvent_kernel(c2, 1.0);
  CHECK(res.values(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(res.values(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(res.values(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("constructor validation names the offending states") {
  Vector m(2);
  m << 0.5, 0.5;

  SUBCASE("nonpositive weight") {
    Matrix q(2, 2);
    q << -1.0, 1.0, 1.0, -1.0;
    Vector bad = m;
    bad(1) = 0.0;
    CHECK_THROWS_AS(Chain({"a", "b"}, bad, q), NonpositiveWeight);
  }
  SUBCASE("negative off-diagonal rate") {
    Matrix q(2, 2);
    q << 1.0, -1.0, 1.0, -1.0;
    CHECK_THROWS_AS(Chain({"a", "b"}, m, q), NegativeRate);
  }
  SUBCASE("m-asymmetric flux") {
    Matrix q(2, 2);
    q << -1.0, 1.0, 2.0, -2.0;
    CHECK_THROWS_WITH_AS(Chain({"a", "b"}, m, q),
                         doctest::Contains("(a,b)"), AsymmetricGenerator);
  }
  SUBCASE("positive row sum") {
    Matrix q(2, 2);
    q << -1.0, 1.5, 1.5, -1.0;
    CHECK_THROWS_AS(Chain({"a", "b"}, m, q), NegativeKilling);
  }
  SUBCASE("unknown label") {
    const Chain c2 = make_c2();
    CHECK(c2.index_of("b") == 1);
    CHECK_THROWS_AS(c2.index_of("zz"), UnknownLabel);
  }
}

TEST_CASE("killing detection and the killed chain's shifted resolvent") {
  const Chain killed = make_c2_killed();
  CHECK_FALSE(killed.conservative());
  CHECK(killed.strictly_sub_markov());
  CHECK(killed.killing()(0) == doctest::Approx(1.0).epsilon(1e-14));

  // r~_0 of the unit-killed chain equals r_1 of the conservative chain.
  const Chain c2 = make_c2();
  const auto shifted = resolvent_kernel(killed, 0.0);
  const auto base = resolvent_kernel(c2, 1.0);
  CHECK((shifted.values - base.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(shifted.values(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("kill_transform shifts the spectrum and reuses the basis") {
  const Chain c2 = make_c2();
  const Chain killed = kill_transform(c2, 0.7);
  CHECK(killed.killing()(0) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(killed.spectral_bottom() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK((killed.spectral().basis - c2.spectral().basis).cwiseAbs().maxCoeff() ==
        0.0);

  // killed beta-resolvent == original (alpha + beta)-resolvent
  const auto lhs = resolvent_kernel(killed, 0.5);
  const auto rhs = resolvent_kernel(c2, 1.2);
  CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() < 1e-12);

  // killed heat kernel == e^{-alpha t} p_t
  const auto ht = heat_kernel(killed, 0.8);
  const auto base = heat_kernel(c2, 0.8);
  CHECK((ht.values - std::exp(-0.7 * 0.8) * base.values)
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  CHECK_THROWS_AS(kill_transform(c2, -1.0), NegativeAlpha);
}

TEST_CASE("part chain on {a} of the two-state chain") {
  const Chain c2 = make_c2();
  const Chain part = part_chain(c2, {0});
  CHECK(part.size() == 1);
  CHECK(part.label(0) == "a");
  CHECK_FALSE(part.conservative());
  const auto p = heat_kernel(part, 1.0);
  CHECK(p.values(0, 0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-13));

  CHECK_THROWS_AS(part_chain(c2, {}), EmptySubset);
  CHECK_THROWS_AS(part_chain(c2, {5}), InvalidSubset);
}

TEST_CASE("canonical_subset sorts and rejects bad input") {
  const Chain chain = path(5);
  const auto sub = canonical_subset(chain, {3, 1, 0});
  CHECK(sub == std::vector<Index>{0, 1, 3});
  CHECK_THROWS_AS(canonical_subset(chain, {3, 1, 3}), InvalidSubset);
  CHECK_THROWS_AS(canonical_subset(chain, {-1}), InvalidSubset);
}

TEST_CASE("dirichlet energy of the two-state chain") {
  const Chain c2 = make_c2();
  Vector f(2);
  f << 1.0, 0.0;
  CHECK(dirichlet_energy(c2, f, f) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dirichlet_energy(c2, f, f, 1) == doctest::Approx(1.0).epsilon(1e-14));

  // energy vanishes on constants for a conservative chain
  const Vector ones = Vector::Ones(2);
  CHECK(std::abs(dirichlet_energy(c2, ones, ones)) < 1e-14);
}

TEST_CASE("built-in graph constructors") {
  const Chain ring = cycle(16);
  CHECK(ring.size() == 16);
  CHECK(ring.conservative());
  // second eigenvalue of the unit-rate cycle: 2(1 - cos(2 pi / 16))
  CHECK(ring.spectral().eigenvalues(1) ==
        doctest::Approx(2.0 * (1.0 - std::cos(2.0 * M_PI / 16.0)))
            .epsilon(1e-12));

  const Chain line = path(9);
  CHECK(line.conservative());
  CHECK(line.generator()(0, 1) == 1.0);
  CHECK(line.generator()(0, 0) == -1.0);
  CHECK(line.generator()(4, 4) == -2.0);

  const Chain bm = reflected_bm_discretization(17, 0.0, 1.0);
  CHECK(bm.m().sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bm.generator()(8, 9) == doctest::Approx(289.0).epsilon(1e-14));

  const Chain bd = birth_death(3, {2.0, 1.0}, {1.0, 4.0});
  CHECK(bd.m()(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(bd.m()(2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bd.conservative());

  CHECK_THROWS_AS(cycle(1), BadParameter);
  CHECK_THROWS_AS(birth_death(3, {1.0}, {1.0, 1.0}), BadParameter);
  CHECK_THROWS_AS(reflected_bm_discretization(4, 1.0, 0.0), BadParameter);
}

TEST_CASE("kernel identities hold on random chains") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Chain chain =
        testsupport::random_chain(seed, 2, 20, seed % 2 == 0);
    const Index n = chain.size();

    // basis is orthonormal in L^2(m)
    const Matrix gram = chain.spectral().basis.transpose() *
                        chain.m().asDiagonal() * chain.spectral().basis;
    CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);

    const auto p1 = heat_kernel(chain, 0.4);
    const auto p2 = heat_kernel(chain, 1.1);
    const auto p3 = heat_kernel(chain, 1.5);

    CHECK((p1.values - p1.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix ck = p1.values * chain.m().asDiagonal() * p2.values;
    CHECK((ck - p3.values).cwiseAbs().maxCoeff() < 1e-11);

    // row masses never exceed one
    const Vector mass = p1.values * chain.m();
    CHECK(mass.maxCoeff() < 1.0 + 1e-12);

    // part kernel is dominated pointwise
    if (n >= 3) {
      std::vector<Index> sub;
      for (Index i = 0; i < n / 2 + 1; ++i) sub.push_back(i);
      const Chain part = part_chain(chain, sub);
      const auto pd = heat_kernel(part, 0.4);
      for (Index i = 0; i < part.size(); ++i) {
        for (Index j = 0; j < part.size(); ++j) {
          CHECK(pd.values(i, j) <= p1.values(i, j) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("kernel guards") {
  const Chain c2 = make_c2();
  CHECK_THROWS_AS(heat_kernel(c2, 0.0), NonpositiveTime);
  CHECK_THROWS_AS(resolvent_kernel(c2, -1.0), NegativeAlpha);
  CHECK_THROWS_AS(resolvent_kernel(c2, 0.0), ZeroAlphaOnConservativeChain);
  CHECK_NOTHROW(resolvent_kernel(make_c2_killed(), 0.0));
}
