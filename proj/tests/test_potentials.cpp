#include <doctest.h>

#include <cmath>

#include "plab/errors.hpp"
#include "plab/potential.hpp"
#include "plab/rng.hpp"
#include "support.hpp"

using namespace plab;

TEST_CASE("simplex potential closed forms at the barycenter preimage") {
  Potential pot = Potential::simplex(2);
  Vec x = Vec::Zero(2);
  CHECK(pot.value(x) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  Vec g = pot.gradient(x);
  CHECK(g[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  Mat h = pot.hessian(x);
  CHECK(h(0, 0) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(h(0, 1) == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
  CHECK(h(1, 0) == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
  CHECK(h(1, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("simplex potential is stable at extreme arguments") {
  Potential pot = Potential::simplex(3);
  Vec x(3);
  x << 300.0, -250.0, 10.0;
  CHECK(std::isfinite(pot.value(x)));
  CHECK(pot.value(x) == doctest::Approx(300.0).epsilon(1e-12));
  Vec g = pot.gradient(x);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.allFinite());
}

TEST_CASE("exponential potential closed forms") {
  Potential p1 = Potential::exponential(1);
  CHECK(p1.hessian(Vec::Zero(1))(0, 0) == doctest::Approx(1.0));

  Potential p2 = Potential::exponential(2);
  Vec x(2);
  x << 0.0, std::log(2.0);
  Vec g = p2.gradient(x);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(2.0));

  Tensor3 t = p2.third(Vec::Zero(2));
  int nonzero = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        if (t(i, j, k) != 0.0) ++nonzero;
  CHECK(nonzero == 2);
  CHECK(t(0, 0, 0) == doctest::Approx(1.0));
  CHECK(t(1, 1, 1) == doctest::Approx(1.0));
}

TEST_CASE("constructors reject n = 0") {
  CHECK_THROWS_AS(Potential::simplex(0), DomainError);
  CHECK_THROWS_AS(Potential::exponential(0), DomainError);
}

TEST_CASE("evaluate_bundle honours the requested order") {
  Potential pot = Potential::simplex(2);
  Vec x = Vec::Zero(2);
  DerivativeBundle b0 = pot.bundle(x, 0);
  CHECK(!b0.gradient.has_value());
  CHECK(!b0.hessian.has_value());
  CHECK(!b0.third.has_value());
  DerivativeBundle b3 = pot.bundle(x, 3);
  CHECK(b3.gradient.has_value());
  CHECK(b3.hessian.has_value());
  CHECK(b3.third.has_value());
  CHECK_THROWS_AS(pot.bundle(x, 4), DomainError);
}

TEST_CASE("finite-difference mode agrees with closed forms") {
  Potential closed = Potential::simplex(2);
  Potential fd = Potential::custom(
      2, [&](const Vec& x) { return closed.value(x); });
  Vec x = Vec::Zero(2);
  CHECK(max_abs_diff(fd.hessian(x), closed.hessian(x)) <= 1e-6);

  Potential efd = Potential::custom(1, [](const Vec& x) { return std::exp(x[0]); });
  Tensor3 t = efd.third(Vec::Zero(1));
  CHECK(std::fabs(t(0, 0, 0) - 1.0) <= 1e-4);
}

TEST_CASE("exponential potential overflow reports an evaluation error") {
  Potential pot = Potential::exponential(1);
  Vec x(1);
  x << 1000.0;
  CHECK_THROWS_AS(pot.value(x), EvaluationError);
}

TEST_CASE("symmetrize_third fixed point and averaging") {
  Potential pot = Potential::exponential(2);
  Tensor3 t = pot.third(Vec::Zero(2));
  auto [sym, score] = symmetrize_third(t);
  CHECK(score == 0.0);
  CHECK(sym(0, 0, 0) == doctest::Approx(1.0));

  Tensor3 raw(3);
  raw(0, 1, 2) = 1.0;
  auto [avg, sc] = symmetrize_third(raw);
  CHECK(avg(0, 1, 2) == doctest::Approx(1.0 / 6.0));
  CHECK(avg(2, 1, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(sc == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("closed-form simplex third tensor is symmetric") {
  Potential pot = Potential::simplex(3);
  CounterRng rng(99);
  for (int t = 0; t < 5; ++t) {
    Vec x = testsup::random_vec(rng, 3, -2.0, 2.0);
    Tensor3 raw = pot.third(x);
    auto [sym, score] = symmetrize_third(raw);
    CHECK(score <= 1e-12);
  }
}

TEST_CASE("inverse hessian matches the rank-one closed form") {
  CounterRng rng(7);
  for (int n : {2, 3, 4}) {
    Potential pot = Potential::simplex(n);
    for (int t = 0; t < 20; ++t) {
      Vec x = testsup::random_vec(rng, n, -3.0, 3.0);
      Mat hinv = pot.hessian(x).inverse();
      double psi = pot.value(x);
      double epsi = std::exp(psi);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double expected = epsi * (1.0 + (i == j ? std::exp(-x[i]) : 0.0));
          CHECK(hinv(i, j) == doctest::Approx(expected).epsilon(1e-8));
        }
    }
  }
}

TEST_CASE("hessian determinant matches the exponential closed form") {
  CounterRng rng(8);
  for (int n : {1, 2, 3, 5}) {
    Potential pot = Potential::simplex(n);
    for (int t = 0; t < 20; ++t) {
      Vec x = testsup::random_vec(rng, n, -3.0, 3.0);
      double det = pot.hessian(x).determinant();
      double expected = std::exp(-(n + 1) * pot.value(x) + x.sum());
      CHECK(det == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("derivative chain consistency against test-side differences") {
  CounterRng rng(11);
  for (auto pot : {Potential::simplex(3), Potential::exponential(3)}) {
    auto value = [&](const Vec& p) { return pot.value(p); };
    auto grad = [&](const Vec& p) { return pot.gradient(p); };
    for (int t = 0; t < 50; ++t) {
      Vec x = testsup::random_vec(rng, 3, -2.0, 2.0);
      CHECK((testsup::fd_gradient(value, x) - pot.gradient(x)).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(max_abs_diff(testsup::fd_jacobian(grad, x), pot.hessian(x)) <= 1e-6);
      // third vs differences of the hessian in one random direction
      int dir = static_cast<int>(rng.next_u64() % 3);
      double h = 1e-5 * (1.0 + std::fabs(x[dir]));
      Vec xp = x, xm = x;
      xp[dir] += h;
      xm[dir] -= h;
      Mat dh = (pot.hessian(xp) - pot.hessian(xm)) / (2.0 * h);
      Tensor3 tt = pot.third(x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::fabs(dh(i, j) - tt(i, j, dir)) <= 1e-6);
    }
  }
}

TEST_CASE("hessian positive definite at probed points") {
  CounterRng rng(13);
  for (auto pot : {Potential::simplex(4), Potential::exponential(4)}) {
    for (int t = 0; t < 25; ++t) {
      Vec x = testsup::random_vec(rng, 4, -3.0, 3.0);
      Eigen::SelfAdjointEigenSolver<Mat> es(pot.hessian(x));
      double lmin = es.eigenvalues().minCoeff();
      double lmax = es.eigenvalues().maxCoeff();
      CHECK(lmin > 1e-10 * lmax);
    }
  }
}

TEST_CASE("custom potential requires a value callable") {
  CHECK_THROWS_AS(Potential::custom(2, nullptr), DomainError);
}
