#include "curvstab/errors.hpp"
#include "curvstab/harmonics.hpp"
#include "curvstab/stability_lab.hpp"
#include "curvstab/suites.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace curvstab;
using curvstab::gen::engine;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Deficits, RoundSphereHasNone) {
  for (int n : {3, 4}) {
    const QuadratureGrid grid = build_grid(n, {8});
    const DeficitReport d = deficits(RadialField(n, Polynomial(n + 1)), grid, 2.0);
    EXPECT_LT(d.ric0_lp, 1e-12);
    EXPECT_LT(d.weyl_lp, 1e-12);
    EXPECT_LT(d.r_minus_avg_lp, 1e-12);
    EXPECT_NEAR(d.r_avg, n * (n - 1.0), 1e-12);
    EXPECT_NEAR(d.volume, sphere_volume(n), 1e-12);
    EXPECT_TRUE(d.convexity_ok);
  }
}

TEST(Deficits, ScaledSphereAverageCurvature) {
  const QuadratureGrid grid = build_grid(3, {8});
  const DeficitReport d = deficits(RadialField(3, Polynomial(4), std::log(2.0)), grid, 2.0);
  EXPECT_NEAR(d.r_avg, 6.0 / 4.0, 1e-12);
  EXPECT_NEAR(d.volume, 8.0 * sphere_volume(3), 1e-10);
  EXPECT_LT(d.ric0_lp, 1e-12);
}

TEST(Deficits, PerturbationCreatesTracelessRicci) {
  const QuadratureGrid grid = build_grid(3, {12});
  const RadialField f(3, zonal_harmonic_unit_peak(3, 2).scaled(0.05));
  const DeficitReport d = deficits(f, grid, 2.0);
  EXPECT_GT(d.ric0_lp, 1e-3);
  EXPECT_LT(d.weyl_lp, 1e-12);  // n = 3
  const DeficitNodes nodes = deficit_nodes(f, grid);
  const DeficitReport d3 = summarize_deficits(nodes, grid, 3.0);
  EXPECT_EQ(summarize_deficits(nodes, grid, 2.0).ric0_lp, d.ric0_lp);
  EXPECT_NE(d3.ric0_lp, d.ric0_lp);
}

TEST(RayTrace, IdentityAtTheOrigin) {
  auto rng = engine(1);
  const RadialField f = gen::small_field(rng, 3);
  const LogRadius lr = log_radius(f);
  const Vec z = gen::unit_vector(rng, 4);
  const RayTrace rt = ray_trace_recenter(lr, Vec::Zero(4), {z.data(), 4});
  EXPECT_LT((rt.x_c - z).norm(), 1e-14);
  EXPECT_NEAR(rt.f_c, f.eval({z.data(), 4}), 1e-14);
}

TEST(RayTrace, OffsetOfUnitSphereHasClosedForm) {
  auto rng = engine(2);
  const LogRadius unit = log_radius(RadialField(3, Polynomial(4)));
  Vec c = Vec::Zero(4);
  c[0] = 0.1;
  c[2] = -0.05;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec z = gen::unit_vector(rng, 4);
    const double zc = z.dot(c);
    const double expected = std::log(-zc + std::sqrt(zc * zc + 1.0 - c.squaredNorm()));
    EXPECT_NEAR(ray_trace_recenter(unit, c, {z.data(), 4}).f_c, expected, 1e-12);
  }
}

TEST(RayTrace, CentreOfOffsetSphereSeesUnitSphere) {
  auto rng = engine(3);
  Vec a = Vec::Zero(4);
  a << 0.2, -0.1, 0.05, 0.0;
  const LogRadius s = offset_sphere(a);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec z = gen::unit_vector(rng, 4);
    const RayTrace rt = ray_trace_recenter(s, a, {z.data(), 4});
    EXPECT_NEAR(rt.f_c, 0.0, 1e-12);
    EXPECT_LT((rt.x_c - (z + a).normalized()).norm(), 1e-12);
  }
  EXPECT_THROW(offset_sphere(Vec::Constant(4, 0.6)), DomainError);
}

TEST(RayTrace, CentreOutsideFails) {
  const LogRadius unit = log_radius(RadialField(3, Polynomial(4)));
  Vec c = Vec::Zero(4);
  c[1] = 1.5;
  const Vec z = Vec::Unit(4, 1);
  EXPECT_THROW(ray_trace_recenter(unit, c, {z.data(), 4}), NumericError);
}

TEST(Recentering, RecoversOffsetSphereCentre) {
  auto rng = engine(4);
  const QuadratureGrid grid = build_grid(3, {12});
  for (int trial = 0; trial < 5; ++trial) {
    const Vec a = gen::unit_vector(rng, 4) * gen::uniform(rng, 0.01, 0.15);
    const CenterSolve s = solve_center(offset_sphere(a), grid);
    EXPECT_LT((s.c0 - a).norm(), 1e-6);
    EXPECT_LT(s.phi_residual, kPhiTolerance);
    EXPECT_EQ(s.trace.size(), static_cast<std::size_t>(s.iterations + s.fallback_steps + 1));
  }
}

TEST(Recentering, PhiAtOriginIsMinusFirstMoment) {
  auto rng = engine(5);
  const QuadratureGrid grid = build_grid(3, {10});
  const RadialField f = gen::small_field(rng, 3);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f.eval(grid.ambient(i));
  EXPECT_LT((phi_map(log_radius(f), Vec::Zero(4), grid) + first_moment(vals, grid)).norm(), 1e-15);
}

TEST(Recentering, EquivariantUnderRotation) {
  auto rng = engine(6);
  const QuadratureGrid grid = build_grid(3, {16});
  for (int trial = 0; trial < 3; ++trial) {
    const RadialField f = gen::tilted_field(rng, 3, 0.08);
    const Mat r = gen::rotation(rng, 4);
    const Vec c = solve_center(f, grid).c0;
    ASSERT_GT(c.norm(), 1e-3);
    const Vec cr = solve_center(rotate(f, r), grid).c0;
    EXPECT_LT((cr - r * c).norm(), 1e-7);
  }
}

TEST(Recentering, IsIdempotent) {
  auto rng = engine(7);
  const QuadratureGrid grid = build_grid(3, {8});
  const RadialField f = gen::tilted_field(rng, 3, 0.08);
  const LogRadius lr = log_radius(f);
  const Vec c0 = solve_center(lr, grid).c0;
  ASSERT_GT(c0.norm(), 1e-3);
  const LogRadius recentred = [&](std::span<const double> z) { return ray_trace_recenter(lr, c0, z).f_c; };
  EXPECT_LT(solve_center(recentred, grid).c0.norm(), 1e-8);
}

TEST(Closeness, OffsetSphereIsAlreadyRound) {
  Vec a = Vec::Zero(4);
  a << 0.05, 0.02, 0.0, -0.03;
  const QuadratureGrid grid = build_grid(3, {12});
  const LogRadius s = offset_sphere(a);
  const CenterSolve c = solve_center(s, grid);
  const Closeness cl = closeness_norms(s, c.c0, grid, 2.0);
  EXPECT_LT(cl.f_c0_w2p, 1e-6);
  EXPECT_LT(cl.psi_minus_id_w2p, 1e-6);
  EXPECT_LT(cl.pullback_w1p, 1e-6);
  EXPECT_THROW(closeness_nodes(s, c.c0, grid, 0.5), DomainError);
}

TEST(Closeness, RecenteredJetMatchesFieldJetAtOrigin) {
  auto rng = engine(8);
  const RadialField f = gen::small_field(rng, 3);
  const auto t = gen::chart_angles_sample(rng, 3, 0.3);
  const SphereJet fd = recentered_jet(log_radius(f), Vec::Zero(4), t, 1e-3);
  const FieldJet exact = eval_jet(f, build_chart_point(t, 2), 2);
  EXPECT_NEAR(fd.value, exact.value, 1e-14);
  EXPECT_LT((fd.grad - exact.d1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((fd.hess - exact.hess).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Sweep, RowOrderStatusAndCsv) {
  SweepConfig cfg;
  cfg.n = 3;
  cfg.p = {2.0, 3.0};
  cfg.resolution = {8};
  cfg.families = {sweep_family(3, "Y2", {0.05, 0.02}), sweep_family(3, "Y1+Y2", {0.05})};
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 6u);
  const std::vector<std::pair<std::string, double>> order = {{"Y2", 0.05}, {"Y2", 0.05}, {"Y2", 0.02},
                                                             {"Y2", 0.02}, {"Y1+Y2", 0.05}, {"Y1+Y2", 0.05}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].case_id, static_cast<int>(k));
    EXPECT_EQ(rows[k].family, order[k].first);
    EXPECT_EQ(rows[k].eps, order[k].second);
    EXPECT_EQ(rows[k].p, k % 2 ? 3.0 : 2.0);
    EXPECT_EQ(rows[k].status, "ok");
    EXPECT_TRUE(std::isfinite(rows[k].ratio_main));
    EXPECT_LT(rows[k].phi_residual, kPhiTolerance);
  }
  std::ostringstream out;
  write_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header());
  const auto header = split(line);
  EXPECT_EQ(header.size(), 22u);
  int count = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), header.size());
    EXPECT_EQ(cells[12], "true");
    EXPECT_EQ(std::stod(cells[5]), rows[count].deficit.ric0_lp);  // 17 digits round-trip
    ++count;
  }
  EXPECT_EQ(count, 6);
}

TEST(Sweep, FailuresAreRecordedNotThrown) {
  SweepConfig cfg;
  cfg.n = 3;
  cfg.p = {2.0};
  cfg.resolution = {8};
  Exponents e{};
  e[0] = 6;
  cfg.families = {{"spike", {{1.0, e}}, {1.5}}};
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NE(rows[0].status, "ok");
  const std::string line = csv_row(rows[0]);
  EXPECT_NE(line.find(rows[0].status), std::string::npos);
}

TEST(Sweep, NanAndBooleansInCsv) {
  SweepRecord r;
  r.n = 3;
  r.p = 2.0;
  r.family = "x";
  r.deficit.convexity_ok = false;
  r.ratio_main = std::nan("");
  r.status = "solver_error";
  const auto cells = split(csv_row(r));
  EXPECT_EQ(cells[12], "false");
  EXPECT_EQ(cells[18], "nan");
  EXPECT_EQ(cells.back(), "solver_error");
}

TEST(Sweep, SerialAndParallelAreIdentical) {
  SweepConfig cfg;
  cfg.n = 3;
  cfg.p = {2.0};
  cfg.resolution = {8};
  cfg.families = {sweep_family(3, "Y1+Y2", {0.05})};
  const auto a = run_sweep(cfg, Execution::serial);
  const auto b = run_sweep(cfg, Execution::parallel);
  EXPECT_EQ(csv_row(a[0]), csv_row(b[0]));
}

TEST(Suites, SweepSummary) {
  std::vector<SweepRecord> rows(3);
  for (int k = 0; k < 3; ++k) {
    rows[k].n = 4;
    rows[k].family = k < 2 ? "a" : "b";
    rows[k].eps = 0.1 / (k + 1);
    rows[k].ratio_main = 1.0 + k;
    rows[k].deficit.ric0_lp = 1.0;
    rows[k].deficit.weyl_lp = 0.5;
    rows[k].deficit.r_avg = 12.0;
    rows[k].deficit.r_minus_avg_lp = 2.0;
    rows[k].status = "ok";
  }
  rows[1].status = "nonconvex";
  const auto s = summarize_sweep(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].name, "a");
  EXPECT_EQ(s[0].rows, 2u);
  EXPECT_FALSE(s[0].all_ok);
  EXPECT_EQ(s[0].ratio_min, 1.0);
  EXPECT_EQ(s[0].ratio_max, 2.0);
  EXPECT_EQ(s[0].weyl_k, 0.5);
  EXPECT_EQ(s[0].scalar_ratio_max, 2.0);
  EXPECT_TRUE(s[1].all_ok);
}

TEST(Suites, FamiliesAndLibrary) {
  EXPECT_THROW(sweep_family(3, "Y7", {0.1}), DomainError);
  EXPECT_EQ(default_sweep_config(3).families.size(), 2u);
  EXPECT_EQ(default_sweep_config(4).families.size(), 3u);
  EXPECT_EQ(harmonic_test_library(3).size(), 18u);
}
