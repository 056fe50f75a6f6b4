#include "curvstab/errors.hpp"
#include "curvstab/reduction.hpp"
#include "curvstab/sphere_grid.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace curvstab;
using curvstab::gen::engine;

TEST(PairwiseSum, ParallelMatchesSerialBitwise) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto rng = engine(seed);
    const std::size_t size = std::uniform_int_distribution<std::size_t>(0, 50000)(rng);
    std::vector<double> v(size);
    for (double& x : v) x = gen::uniform(rng, -1e3, 1e3) * std::pow(10.0, gen::uniform(rng, -8, 8));
    for (int threads : {1, 3, 8}) {
      set_thread_count(threads);
      EXPECT_EQ(pairwise_sum_serial(v), pairwise_sum_parallel(v)) << "seed " << seed << " threads " << threads;
    }
  }
  set_thread_count(1);
}

TEST(PairwiseSum, SmallCases) {
  EXPECT_EQ(pairwise_sum_serial(std::vector<double>{}), 0.0);
  EXPECT_EQ(pairwise_sum_serial(std::vector<double>{2.5}), 2.5);
  std::vector<double> ones(1000, 0.1);
  EXPECT_NEAR(pairwise_sum_parallel(ones), 100.0, 1e-12);
}

TEST(MapNodes, RethrowsFirstFailure) {
  for (Execution e : {Execution::serial, Execution::parallel}) {
    EXPECT_THROW(map_nodes(
                     100,
                     [](std::size_t i) {
                       if (i == 37) throw NumericError("node 37");
                     },
                     e),
                 NumericError);
  }
}

TEST(SphereVolume, KnownValues) {
  EXPECT_NEAR(sphere_volume(1), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_volume(2), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_volume(3), 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
  EXPECT_NEAR(sphere_volume(4), 8.0 * std::pow(std::numbers::pi, 2) / 3.0, 1e-13);
}

TEST(SphereMonomial, MomentsOfSquares) {
  for (int n = 3; n <= 5; ++n) {
    const double vol = sphere_volume(n);
    std::vector<int> e(n + 1, 0);
    e[0] = 2;
    EXPECT_NEAR(sphere_monomial_integral(e), vol / (n + 1), 1e-13);
    e[0] = 4;
    EXPECT_NEAR(sphere_monomial_integral(e), 3.0 * vol / ((n + 1) * (n + 3)), 1e-13);
    e[0] = 2;
    e[1] = 2;
    EXPECT_NEAR(sphere_monomial_integral(e), vol / ((n + 1) * (n + 3)), 1e-13);
    e = std::vector<int>(n + 1, 0);
    e[2] = 3;
    EXPECT_EQ(sphere_monomial_integral(e), 0.0);
  }
}

TEST(Quadrature, IntegratesLowDegreeMonomialsExactly) {
  for (int n : {3, 4}) {
    const QuadratureGrid grid = build_grid(n, {8});
    EXPECT_NEAR(grid.total_weight, sphere_volume(n), 1e-12);
    std::vector<double> vals(grid.size());
    for (const auto& e : std::vector<std::vector<int>>{{2, 0, 0, 0}, {0, 0, 4, 0}, {2, 2, 2, 0}, {1, 1, 0, 0}}) {
      std::vector<int> ex = e;
      ex.resize(n + 1, 0);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = 1.0;
        for (int a = 0; a <= n; ++a) v *= std::pow(grid.ambient(i)[a], ex[a]);
        vals[i] = v;
      }
      EXPECT_NEAR(integrate(vals, grid), sphere_monomial_integral(ex), 1e-12) << "n " << n;
    }
  }
}

TEST(Quadrature, FirstMomentOfLinearFunction) {
  auto rng = engine(4);
  const QuadratureGrid grid = build_grid(3, {10});
  const Vec v = gen::unit_vector(rng, 4) * 0.7;
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += v[a] * grid.ambient(i)[a];
    vals[i] = s + 3.0;
  }
  EXPECT_LT((first_moment(vals, grid) - v).norm(), 1e-13);
}

TEST(Quadrature, LpNormOfConstant) {
  const QuadratureGrid grid = build_grid(3, {6});
  std::vector<double> twos(grid.size(), 2.0);
  EXPECT_NEAR(lp_norm(twos, 2.0, grid), 2.0 * std::sqrt(sphere_volume(3)), 1e-12);
  EXPECT_NEAR(lp_norm(twos, 3.0, grid), 2.0 * std::cbrt(sphere_volume(3)), 1e-12);
}

TEST(Quadrature, SerialAndParallelKernelsAgreeBitwise) {
  const QuadratureGrid grid = build_grid(3, {12});
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = std::exp(grid.ambient(i)[1]) * grid.ambient(i)[0];
  EXPECT_EQ(integrate(vals, grid, Execution::serial), integrate(vals, grid, Execution::parallel));
  EXPECT_EQ(lp_norm(vals, 2.5, grid, std::nullopt, Execution::serial),
            lp_norm(vals, 2.5, grid, std::nullopt, Execution::parallel));
}

TEST(GaussGegenbauer, LegendreCase) {
  std::vector<double> x, w;
  gauss_gegenbauer(7, 0.0, x, w);
  double s0 = 0, s12 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s12 += w[i] * std::pow(x[i], 12);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s12, 2.0 / 13.0, 1e-14);
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
}

TEST(GaussGegenbauer, HalfIntegerWeight) {
  // (1 - t^2)^(1/2): moments pi/2 and pi/8 for t^0 and t^2
  std::vector<double> x, w;
  gauss_gegenbauer(5, 0.5, x, w);
  double s0 = 0, s2 = 0, s9 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * x[i] * x[i];
    s9 += w[i] * std::pow(x[i], 9);
  }
  EXPECT_NEAR(s0, std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(s2, std::numbers::pi / 8, 1e-14);
  EXPECT_NEAR(s9, 0.0, 1e-15);
  EXPECT_THROW(gauss_gegenbauer(3, -1.0, x, w), DomainError);
}

TEST(Chart, AnglesInvertEmbedding) {
  auto rng = engine(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 4;
    const auto t = gen::chart_angles_sample(rng, n, 1e-3);
    const Vec x = embed(t);
    EXPECT_NEAR(x.norm(), 1.0, 1e-14);
    const Vec back = chart_angles({x.data(), static_cast<std::size_t>(n + 1)});
    for (int a = 0; a < n; ++a) EXPECT_NEAR(back[a], t[a], 1e-10) << "trial " << trial;
  }
}

TEST(Chart, MetricIsRoundSphereMetric) {
  auto rng = engine(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = gen::chart_angles_sample(rng, 4);
    const ChartPoint pt = build_chart_point(t, 2);
    const Mat jtj = pt.jacobian.transpose() * pt.jacobian;
    EXPECT_LT((jtj - pt.sigma).cwiseAbs().maxCoeff(), 1e-14);
    // nested chart: sigma is diagonal with entries prod sin^2 of earlier angles
    double prod = 1.0;
    for (int a = 0; a < 4; ++a) {
      EXPECT_NEAR(pt.sigma(a, a), prod, 1e-14);
      prod *= std::sin(t[a]) * std::sin(t[a]);
    }
  }
}

TEST(Chart, RejectsPoles) {
  EXPECT_THROW(build_chart_point(std::vector<double>{0.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(build_chart_point(std::vector<double>{1.0, std::numbers::pi, 1.0}), DomainError);
  EXPECT_THROW(build_chart_point(std::vector<double>{1.0, 1.0, 1.0}, 4), DomainError);
}

TEST(Grid, Validation) {
  EXPECT_THROW(build_grid(2, {8}), DomainError);
  EXPECT_THROW(build_grid(3, {3}), DomainError);
  EXPECT_EQ(expand_resolution(3, {8}), (std::vector<int>{8, 8, 16}));
  EXPECT_EQ(default_resolution(3), (std::vector<int>{24, 24, 48}));
  EXPECT_EQ(default_resolution(4), (std::vector<int>{16, 16, 16, 32}));
  const QuadratureGrid grid = build_grid(3, {4, 5, 8});
  EXPECT_EQ(grid.size(), 4u * 5u * 8u);
  EXPECT_GT(grid.min_pole_distance(), kChartSingularityGuard);
}

TEST(Sobolev, RequiresEnoughDerivatives) {
  const QuadratureGrid grid = build_grid(3, {4});
  std::vector<JetMagnitudes> jets(grid.size(), JetMagnitudes{1.0, 0.0, 0.0, 0});
  EXPECT_THROW(sobolev_norm(jets, 1, 2.0, grid), DomainError);
  EXPECT_THROW(sobolev_norm(jets, 0, 1.0, grid), DomainError);
  EXPECT_NEAR(sobolev_norm(jets, 0, 2.0, grid), std::sqrt(sphere_volume(3)), 1e-12);
}
