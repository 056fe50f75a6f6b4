#include "curvstab/errors.hpp"
#include "curvstab/harmonics.hpp"
#include "curvstab/radial_field.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace curvstab;
using curvstab::gen::engine;

namespace {

// tr_sigma hess f
double sphere_laplacian(const FieldJet& jet, const ChartPoint& pt) {
  return pt.sigma_inv.cwiseProduct(jet.hess).sum();
}

}  // namespace

TEST(Polynomial, EvalAndDerivativesAgainstHandComputed) {
  // P = 3 x0^2 x1 - x2^3 + 2
  Exponents a{}, b{};
  a[0] = 2;
  a[1] = 1;
  b[2] = 3;
  const Polynomial p(3, {{3.0, a}, {-1.0, b}, {2.0, Exponents{}}});
  const std::vector<double> x = {0.5, -1.0, 2.0};
  EXPECT_DOUBLE_EQ(p.eval(x), 3 * 0.25 * -1.0 - 8.0 + 2.0);
  const AmbientJet j = p.derivatives(x, 3);
  EXPECT_DOUBLE_EQ(j.grad[0], 6 * 0.5 * -1.0);
  EXPECT_DOUBLE_EQ(j.grad[1], 3 * 0.25);
  EXPECT_DOUBLE_EQ(j.grad[2], -3 * 4.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 1), 6 * 0.5);
  EXPECT_DOUBLE_EQ(j.hess(1, 0), 6 * 0.5);
  EXPECT_DOUBLE_EQ(j.hess(2, 2), -6 * 2.0);
  EXPECT_DOUBLE_EQ(j.third(0, 0, 1), 6.0);
  EXPECT_DOUBLE_EQ(j.third(1, 0, 0), 6.0);
  EXPECT_DOUBLE_EQ(j.third(2, 2, 2), -6.0);
  EXPECT_DOUBLE_EQ(j.third(0, 1, 2), 0.0);
}

TEST(Polynomial, RejectsBadTerms) {
  Exponents e{};
  e[3] = 1;
  EXPECT_THROW(Polynomial(3, {{1.0, e}}), DomainError);
  e = {};
  e[0] = -1;
  EXPECT_THROW(Polynomial(3, {{1.0, e}}), DomainError);
  e = {};
  e[0] = 30;
  EXPECT_THROW(Polynomial(3, {{1.0, e}}), DomainError);
}

TEST(Polynomial, ComposeWithRotationPreservesSphereIntegral) {
  auto rng = engine(1);
  const Polynomial y = harmonic_library(3)[20].normalized;
  const Polynomial sq = y * y;
  const Mat r = gen::rotation(rng, 4);
  EXPECT_NEAR(sq.compose_linear(r).sphere_integral(), sq.sphere_integral(), 1e-11);
  EXPECT_NEAR(sq.sphere_integral() / sphere_volume(3), 1.0, 1e-12);
}

TEST(Harmonics, BasisSizeMatchesDimensionFormula) {
  for (int l = 0; l <= 6; ++l) {
    EXPECT_EQ(harmonic_dimension(3, l), (l + 1) * (l + 1));  // S^3
    EXPECT_EQ(static_cast<int>(harmonic_basis(3, l).size()), (l + 1) * (l + 1));
    EXPECT_EQ(static_cast<int>(harmonic_basis(4, l).size()), (l + 1) * (l + 2) * (2 * l + 3) / 6);
  }
}

TEST(Harmonics, ExactlyHarmonicAndNormalized) {
  for (int n : {3, 4, 5}) {
    for (const auto& h : harmonic_library(n)) {
      EXPECT_TRUE(h.exact.laplacian().is_zero());
      for (const auto& t : h.normalized.laplacian().terms()) EXPECT_LT(std::abs(t.coeff), 1e-11);
      EXPECT_NEAR((h.normalized * h.normalized).sphere_integral() / sphere_volume(n), 1.0, 1e-10);
    }
  }
}

TEST(Harmonics, SphereEigenfunctionProperty) {
  auto rng = engine(5);
  for (int n : {3, 4, 5}) {
    const auto& lib = harmonic_library(n);
    for (int trial = 0; trial < 40; ++trial) {
      const auto& h = lib[std::uniform_int_distribution<std::size_t>(0, lib.size() - 1)(rng)];
      const RadialField f(n, h.normalized);
      const ChartPoint pt = build_chart_point(gen::chart_angles_sample(rng, n), 2);
      const FieldJet jet = eval_jet(f, pt, 2);
      EXPECT_NEAR(sphere_laplacian(jet, pt), sphere_eigenvalue(n, h.degree) * jet.value,
                  1e-8 * (1 + std::abs(jet.value)))
          << "n " << n << " degree " << h.degree;
    }
  }
}

TEST(Harmonics, UnitPeakZonal) {
  for (int n : {3, 4}) {
    for (int l : {1, 2, 3}) {
      const Polynomial y = zonal_harmonic_unit_peak(n, l);
      std::vector<double> pole(n + 1, 0.0);
      pole[0] = 1.0;
      EXPECT_NEAR(y.eval(pole), 1.0, 1e-14);
      const QuadratureGrid grid = build_grid(n, {8});
      for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LE(std::abs(y.eval(grid.ambient(i))), 1.0 + 1e-12);
    }
  }
  // Y_2 on S^3 is x0^2 - (x1^2 + x2^2 + x3^2)/3
  const Polynomial y = zonal_harmonic_unit_peak(3, 2);
  const std::vector<double> x = {0.6, 0.0, 0.8, 0.0};
  EXPECT_NEAR(y.eval(x), 0.36 - 0.64 / 3.0, 1e-14);
}

TEST(RadialField, ConstructorValidatesVariables) {
  EXPECT_THROW(RadialField(3, Polynomial(3, {Term{1.0, {2, 0, 0}}})), DomainError);
  EXPECT_NO_THROW(RadialField(3, Polynomial(3)));  // empty means f = 0
  EXPECT_NO_THROW(RadialField(3, Polynomial(4)));
}

TEST(RadialField, ShiftAddsConstantEverywhere) {
  auto rng = engine(7);
  const RadialField f = gen::small_field(rng, 3);
  const RadialField g = shift_constant(f, 0.3);
  const QuadratureGrid grid = build_grid(3, {6});
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_DOUBLE_EQ(g.eval(grid.ambient(i)), f.eval(grid.ambient(i)) + 0.3);
  EXPECT_EQ(shift_constant(f, 0.0).eval(grid.ambient(3)), f.eval(grid.ambient(3)));
}

TEST(RadialField, JetsAreLinearInTheField) {
  auto rng = engine(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 2;
    const RadialField f1 = gen::small_field(rng, n, 1.0);
    const RadialField f2 = gen::small_field(rng, n, 1.0);
    const double a = gen::uniform(rng, -2, 2), b = gen::uniform(rng, -2, 2);
    const RadialField mix(n, f1.poly.scaled(a) + f2.poly.scaled(b));
    const ChartPoint pt = build_chart_point(gen::chart_angles_sample(rng, n), 3);
    const FieldJet j1 = eval_jet(f1, pt), j2 = eval_jet(f2, pt), jm = eval_jet(mix, pt);
    const double scale = 1 + std::abs(a) + std::abs(b);
    EXPECT_NEAR(jm.value, a * j1.value + b * j2.value, 1e-12 * scale);
    EXPECT_LT((jm.d1 - (a * j1.d1 + b * j2.d1)).cwiseAbs().maxCoeff(), 1e-12 * scale * 10);
    EXPECT_LT((jm.hess - (a * j1.hess + b * j2.hess)).cwiseAbs().maxCoeff(), 1e-12 * scale * 10);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          EXPECT_NEAR(jm.third(k, i, j), a * j1.third(k, i, j) + b * j2.third(k, i, j), 1e-10 * scale);
  }
}

TEST(RadialField, LinearFieldsAreFirstEigenfunctions) {
  auto rng = engine(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 3;
    const Vec v = gen::unit_vector(rng, n + 1) * gen::uniform(rng, 0.1, 2.0);
    const RadialField f = obata_field({v.data(), static_cast<std::size_t>(n + 1)});
    const ChartPoint pt = build_chart_point(gen::chart_angles_sample(rng, n), 2);
    const FieldJet jet = eval_jet(f, pt, 2);
    EXPECT_NEAR(sphere_laplacian(jet, pt), -n * jet.value, 1e-9);
    // hess phi_v = -phi_v sigma on the round sphere
    EXPECT_LT((jet.hess + jet.value * pt.sigma).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RadialField, ThirdDerivativesCommuteWithSphereCurvature) {
  auto rng = engine(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 3;
    const RadialField f = gen::small_field(rng, n, 1.0);
    const ChartPoint pt = build_chart_point(gen::chart_angles_sample(rng, n), 3);
    EXPECT_LT(ricci_commutation_check(f, pt), 1e-9);
  }
}

TEST(RadialField, HessianMatchesFiniteDifferencesOfGradient) {
  auto rng = engine(12);
  const RadialField f = gen::small_field(rng, 3, 1.0);
  const auto t = gen::chart_angles_sample(rng, 3);
  const ChartPoint pt = build_chart_point(t, 3);
  const FieldJet jet = eval_jet(f, pt);
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    auto tp = t, tm = t;
    tp[k] += h;
    tm[k] -= h;
    const FieldJet jp = eval_jet(f, build_chart_point(tp, 2), 1);
    const FieldJet jm = eval_jet(f, build_chart_point(tm, 2), 1);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR((jp.d1[i] - jm.d1[i]) / (2 * h), jet.d2(k, i), 1e-7);
  }
}

TEST(RadialField, RotationMovesTheSurface) {
  auto rng = engine(13);
  const RadialField f = gen::small_field(rng, 4, 1.0);
  const Mat r = gen::rotation(rng, 5);
  const RadialField g = rotate(f, r);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = gen::unit_vector(rng, 5);
    const Vec rx = r * x;
    EXPECT_NEAR(g.eval({rx.data(), 5}), f.eval({x.data(), 5}), 1e-12);
  }
}
