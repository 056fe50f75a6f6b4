#include "curvstab/errors.hpp"
#include "curvstab/polynomial_lemmas.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace curvstab;
using curvstab::gen::engine;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, int n, double lambda) {
  std::vector<double> x(n);
  for (double& v : x) v = gen::uniform(rng, -lambda, lambda);
  return x;
}

// direct definitions, no power sums
double p_direct(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (i != j) s += (x[i] * x[j] - 1.0) * (x[i] * x[j] - 1.0);
  return 8.0 * s;
}

double q_direct(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (double v : x) h += v;
  double s = 0.0;
  for (double v : x) s += std::pow(h * v - v * v - (n - 1.0), 2);
  return s;
}

double r_direct(const std::vector<double>& x) {
  double a = 0.0, b = 0.0;
  for (double v : x) {
    a += (v - 1) * (v - 1);
    b += (v + 1) * (v + 1);
  }
  return a * b;
}

std::vector<double> diagonal_plus(int n, double sign, const std::vector<double>& y) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = sign + y[i];
  return x;
}

}  // namespace

TEST(LemmaPolynomials, ClosedFormsMatchDefinitions) {
  auto rng = engine(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 4;
    const auto x = random_point(rng, n, 3.0);
    const double scale = 1.0 + p_direct(x);
    EXPECT_NEAR(p_value(x), p_direct(x), 1e-12 * scale);
    EXPECT_NEAR(p_brute_force(x), p_direct(x), 1e-12 * scale);
    EXPECT_NEAR(q_value(x), q_direct(x), 1e-12 * (1 + q_direct(x)));
    EXPECT_NEAR(r_value(x), r_direct(x), 1e-12 * (1 + r_direct(x)));
    const PqrValues all = eval_pqr(x);
    EXPECT_EQ(all.p, p_value(x));
    EXPECT_EQ(all.q, q_value(x));
    EXPECT_EQ(all.r, r_value(x));
  }
}

TEST(LemmaPolynomials, KnownValues) {
  for (int n = 3; n <= 6; ++n) {
    const std::vector<double> zero(n, 0.0), plus(n, 1.0), minus(n, -1.0);
    EXPECT_DOUBLE_EQ(p_value(zero), 8.0 * n * (n - 1));
    EXPECT_DOUBLE_EQ(q_value(zero), n * (n - 1.0) * (n - 1.0));
    EXPECT_DOUBLE_EQ(r_value(zero), n * n);
    for (const auto* x : {&plus, &minus}) {
      EXPECT_NEAR(p_value(*x), 0.0, 1e-12);
      EXPECT_NEAR(q_value(*x), 0.0, 1e-12);
      EXPECT_NEAR(r_value(*x), 0.0, 1e-12);
    }
  }
}

TEST(LemmaPolynomials, GradientAndHessianMatchFiniteDifferences) {
  auto rng = engine(2);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 3;
    const LemmaPoly which = static_cast<LemmaPoly>(trial % 3);
    auto x = random_point(rng, n, 2.0);
    const Vec g = lemma_gradient(which, x);
    const Mat h = lemma_hessian(which, x);
    const double step = 1e-5;
    for (int i = 0; i < n; ++i) {
      auto xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd = (lemma_value(which, xp) - lemma_value(which, xm)) / (2 * step);
      EXPECT_NEAR(g[i], fd, 1e-5 * (1 + std::abs(fd))) << to_string(which);
      const Vec col = (lemma_gradient(which, xp) - lemma_gradient(which, xm)) / (2 * step);
      for (int j = 0; j < n; ++j) EXPECT_NEAR(h(j, i), col[j], 1e-5 * (1 + std::abs(col[j])));
    }
    if (which == LemmaPoly::p) {
      EXPECT_LT((grad_p(x) - g).cwiseAbs().maxCoeff(), 1e-10 * (1 + g.norm()));
    }
  }
}

TEST(LemmaPolynomials, DiagonalExpansionLimits) {
  auto rng = engine(3);
  for (int n = 3; n <= 5; ++n) {
    // along the diagonal itself p / r -> 8 (n - 1) / n
    std::vector<double> y(n, 1e-5);
    for (double sign : {1.0, -1.0}) {
      const auto x = diagonal_plus(n, sign, y);
      EXPECT_NEAR(p_value(x) / r_value(x), 8.0 * (n - 1) / n, 1e-3);
    }
    EXPECT_NEAR(p_over_r_limit(y), 8.0 * (n - 1) / n, 1e-12);
    // (t, -t, 0, ...) has H = 0, so q ~ 2 (n - 2)^2 t^2
    std::vector<double> z(n, 0.0);
    z[0] = 1e-4;
    z[1] = -1e-4;
    EXPECT_NEAR(q_quadratic(z), 2.0 * (n - 2) * (n - 2) * 1e-8, 1e-20);
    EXPECT_NEAR(q_value(diagonal_plus(n, 1.0, z)) / q_quadratic(z), 1.0, 1e-6);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec dir = gen::unit_vector(rng, n) * 1e-4;
      std::vector<double> yy(dir.data(), dir.data() + n);
      const auto x = diagonal_plus(n, -1.0, yy);
      EXPECT_NEAR(p_value(x) / r_value(x), p_over_r_limit(yy), 2e-3 * p_over_r_limit(yy));
      EXPECT_NEAR(q_value(x) / q_quadratic(yy), 1.0, 5e-3);
    }
  }
}

TEST(LemmaPolynomials, PolishConvergesToDiagonal) {
  auto rng = engine(4);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 3;
    const LemmaPoly which = static_cast<LemmaPoly>(trial % 3);
    Vec start(n);
    const double sign = trial % 2 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) start[i] = sign + gen::uniform(rng, -0.05, 0.05);
    const PolishResult r = polish_minimum(which, start);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((r.x - Vec::Constant(n, sign)).cwiseAbs().maxCoeff(), 1e-7) << to_string(which);
  }
}

TEST(CertifyZeros, FindsExactlyTheDiagonalPair) {
  for (LemmaPoly which : {LemmaPoly::p, LemmaPoly::q, LemmaPoly::r}) {
    const ZeroReport rep = certify_zeros(which, 3, 2.0, 0.1);
    EXPECT_TRUE(rep.pass) << to_string(which);
    ASSERT_EQ(rep.zeros.size(), 2u);
    EXPECT_EQ(rep.unresolved, 0u);
    EXPECT_LT(rep.max_zero_distance, kZeroTolerance);
    EXPECT_GT(rep.witness_min, 0.0);
    EXPECT_NEAR(std::abs(rep.zeros[0].sum()), 3.0, 1e-8);
  }
}

TEST(CertifyZeros, SerialAndParallelAgree) {
  const ZeroReport a = certify_zeros(LemmaPoly::q, 3, 2.0, 0.1, Execution::serial);
  const ZeroReport b = certify_zeros(LemmaPoly::q, 3, 2.0, 0.1, Execution::parallel);
  EXPECT_EQ(a.candidates, b.candidates);
  EXPECT_EQ(a.witness_min, b.witness_min);
  EXPECT_EQ(a.zeros.size(), b.zeros.size());
}

TEST(CertifyZeros, ParameterValidation) {
  EXPECT_THROW(certify_zeros(LemmaPoly::p, 3, 1.0, 0.05), DomainError);
  EXPECT_THROW(certify_zeros(LemmaPoly::p, 3, 3.0, 0.2), DomainError);
  EXPECT_THROW(certify_zeros(LemmaPoly::p, 2, 3.0, 0.05), DomainError);
  EXPECT_THROW(lemma_poly_from_string("s"), DomainError);
  EXPECT_EQ(lemma_poly_from_string("q"), LemmaPoly::q);
  EXPECT_EQ(to_string(LemmaPoly::r), "r");
}

TEST(QuotientBounds, PositiveMinimaAndSmallShellResiduals) {
  const BoundsReport rep = quotient_bounds(4, 3.0, 20000, 1e-6, 11, 1000);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.q_over_p.min, 0.0);
  EXPECT_GT(rep.p_over_r.min, 0.0);
  ASSERT_EQ(rep.shells.size(), 3u);
  EXPECT_LT(rep.shells.back().p_over_r_residual, rep.expansion_tolerance);
  EXPECT_LT(rep.shells.back().q_residual, rep.expansion_tolerance);
  EXPECT_THROW(quotient_bounds(4, 3.0, 10, 0.0, 1), DomainError);
}

TEST(QuotientBounds, SeedOnlyMovesSamples) {
  const BoundsReport a = quotient_bounds(3, 3.0, 5000, 1e-6, 1, 500);
  const BoundsReport b = quotient_bounds(3, 3.0, 5000, 1e-6, 1, 500);
  const BoundsReport c = quotient_bounds(3, 3.0, 5000, 1e-6, 2, 500);
  EXPECT_EQ(a.q_over_p.min, b.q_over_p.min);
  EXPECT_NE(a.q_over_p.min, c.q_over_p.min);
}

TEST(Halton, FirstPointsInBaseTwoAndThree) {
  std::vector<double> pt(2);
  halton_point(1, 2, pt);
  EXPECT_DOUBLE_EQ(pt[0], 0.5);
  EXPECT_DOUBLE_EQ(pt[1], 1.0 / 3.0);
  halton_point(2, 2, pt);
  EXPECT_DOUBLE_EQ(pt[0], 0.25);
  EXPECT_DOUBLE_EQ(pt[1], 2.0 / 3.0);
}

TEST(PDiscrepancy, ClosedFormAgreesWithContraction) {
  EXPECT_LT(max_p_discrepancy(3, 3.0, 5000, 1), 1e-10);
  EXPECT_LT(max_p_discrepancy(5, 3.0, 5000, 2), 1e-10);
}
