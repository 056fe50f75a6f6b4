#include "curvstab/suites.hpp"

#include "curvstab/errors.hpp"
#include "curvstab/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace curvstab {
namespace {

// generic point away from the chart poles and from symmetry planes
std::vector<double> probe_angles(int n) {
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = 0.7 + 0.37 * i;
  return a;
}

std::vector<int> doubled_resolution(int n, const std::vector<int>& res) {
  std::vector<int> d = expand_resolution(n, res);
  for (int& r : d) r *= 2;
  return d;
}

Polynomial family_polynomial(int n, const std::string& name) {
  if (name == "Y2") return zonal_harmonic_unit_peak(n, 2);
  if (name == "Y1+Y2") return zonal_harmonic_unit_peak(n, 1) + zonal_harmonic_unit_peak(n, 2);
  if (name == "Y2s") {
    Exponents a{}, b{};
    a[0] = 2;
    b[1] = 2;
    return Polynomial(n + 1, {{1.0, a}, {-1.0, b}});
  }
  throw DomainError("unknown sweep family '" + name + "' (expected Y2, Y1+Y2 or Y2s)");
}

}  // namespace

std::vector<RadialField> harmonic_test_library(int n, double amplitude) {
  const auto& lib = harmonic_library(n);
  std::vector<RadialField> out;
  for (int deg = 1; deg <= 6; ++deg) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < lib.size(); ++i)
      if (lib[i].degree == deg) idx.push_back(i);
    if (idx.empty()) continue;
    std::vector<std::size_t> pick = {idx.front(), idx[idx.size() / 2], idx.back()};
    pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
    for (std::size_t i : pick) out.emplace_back(n, lib[i].normalized.scaled(amplitude));
  }
  return out;
}

PipelineCheck curvature_pipeline_check(int n, int fields, std::uint64_t seed, Execution exec) {
  const QuadratureGrid grid = build_grid(n, {8});
  std::mt19937_64 rng(seed);
  PipelineCheck out;
  out.n = n;
  out.fields = fields;
  for (int k = 0; k < fields; ++k) {
    const RadialField field = random_harmonic_field(n, rng, 1, 4, 3, 0.2);
    std::vector<std::array<double, 4>> gaps(grid.size());
    map_nodes(
        grid.size(),
        [&](std::size_t i) {
          const ChartPoint pt = grid.chart_point(i, 2);
          const GeometryJet geom = assemble(eval_jet(field, pt), pt);
          const Mat& gi = geom.g_inv;
          const double ric_norm = norm2(geom.ric, gi);
          const double riem2 = inner4(geom.riem, geom.riem, gi);
          const RiemannPieces pieces = decompose(geom.riem, geom.g, geom.scalar, geom.ric0);
          const double sum = inner4(pieces.scalar_part, pieces.scalar_part, gi) +
                             inner4(pieces.ric0_part, pieces.ric0_part, gi) + inner4(pieces.weyl, pieces.weyl, gi);
          const Mat wtr = ricci_contraction(geom.weyl, gi);
          gaps[i] = {norm2(geom.ric - gauss_ricci(geom), gi) / (1.0 + ric_norm),
                     std::abs(riem2 - sum) / std::max(1.0, riem2),
                     wtr.cwiseAbs().maxCoeff() / (1.0 + std::sqrt(std::max(riem2, 0.0))),
                     norm4(geom.weyl, gi)};
        },
        exec);
    for (const auto& g : gaps) {
      out.ricci_gap = std::max(out.ricci_gap, g[0]);
      out.norm_identity = std::max(out.norm_identity, g[1]);
      out.weyl_trace = std::max(out.weyl_trace, g[2]);
      out.weyl_norm = std::max(out.weyl_norm, g[3]);
    }
    out.nodes += grid.size();
  }
  out.pass = out.ricci_gap < 1e-9 && out.norm_identity < 1e-8 && out.weyl_trace < 1e-8 &&
             (n != 3 || out.weyl_norm < 1e-8);
  return out;
}

IdentitySuite run_identity_suite(int n, std::vector<int> resolution, double tolerance,
                                 std::uint64_t seed, Execution exec) {
  IdentitySuite s;
  s.n = n;
  s.resolution = expand_resolution(n, resolution.empty() ? default_resolution(n) : resolution);
  s.tolerance = tolerance;
  const QuadratureGrid grid = build_grid(n, s.resolution);
  const auto library = harmonic_test_library(n);

  const std::vector<double> angles = probe_angles(n);
  const ChartPoint pt = build_chart_point(angles, 3);
  for (const auto& field : library) s.commutation = std::max(s.commutation, ricci_commutation_check(field, pt));

  for (std::size_t k = 0; k < library.size(); ++k) {
    const std::string label = "library[" + std::to_string(k) + "] degree " +
                              std::to_string(library[k].poly.degree());
    BianchiResult b = bianchi_residual(library[k], grid, 2.0, label, exec);
    s.bianchi_max = std::max({s.bianchi_max, b.contracted.pointwise_max, b.traceless.pointwise_max});
    s.bianchi.push_back(std::move(b.contracted));
    s.bianchi.push_back(std::move(b.traceless));
  }
  s.bianchi_pass = s.bianchi_max < tolerance;

  // a few fields spread over the degrees
  s.gate_pass = true;
  for (std::size_t k = 0; k < library.size(); k += std::max<std::size_t>(1, library.size() / 3)) {
    s.gates.push_back(bianchi_fd_gate(library[k], angles));
    s.gate_pass = s.gate_pass && s.gates.back().pass;
  }

  std::mt19937_64 rng(seed);
  for (int k = 0; k < 20; ++k) {
    const RadialField field = random_harmonic_field(n, rng, 1, 6, 4, 1.0);
    s.bochner.push_back(bochner_residual(field, grid, exec));
    s.bochner_max = std::max(s.bochner_max, s.bochner.back());
  }
  s.bochner_pass = s.bochner_max < kBochnerTolerance;

  s.pipeline = curvature_pipeline_check(n, 20, seed + 1, exec);

  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  s.linearization =
      linearization_residuals(RadialField(n, zonal_harmonic_unit_peak(n, 2)), eps, grid, 2.0, exec);
  s.linearization_pass = true;
  for (double slope : s.linearization.slopes)
    s.linearization_pass = s.linearization_pass && std::abs(slope - 2.0) <= kSlopeTolerance;

  s.pass = s.commutation < 1e-9 && s.bianchi_pass && s.gate_pass && s.bochner_pass && s.pipeline.pass &&
           s.linearization_pass;
  return s;
}

ObataStudy run_obata_study(int n, int fields, std::vector<double> p, std::vector<int> resolution,
                           std::uint64_t seed, Execution exec) {
  if (fields < 1) throw DomainError("obata study needs at least one field");
  if (p.empty()) throw DomainError("obata study needs at least one p");
  ObataStudy s;
  s.n = n;
  s.fields = fields;
  s.p = std::move(p);
  s.resolution = expand_resolution(n, resolution.empty() ? default_resolution(n) : resolution);
  s.doubled = doubled_resolution(n, s.resolution);
  const QuadratureGrid grid = build_grid(n, s.resolution);
  const QuadratureGrid fine = build_grid(n, s.doubled);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    std::vector<double> v(n + 1);
    for (double& x : v) x = unit(rng);
    for (const auto& r : obata_ratio(obata_field(v), grid, s.p, exec)) {
      s.linear_lhs = std::max(s.linear_lhs, r.lhs);
      s.linear_rhs = std::max(s.linear_rhs, r.rhs);
    }
  }

  const std::size_t np = s.p.size();
  s.max_ratio.assign(np, 0.0);
  s.max_ratio_doubled.assign(np, 0.0);
  for (int k = 0; k < fields; ++k) {
    const RadialField field = random_harmonic_field(n, rng, 2, 6, 3, 1.0);
    const auto base = obata_ratio(field, grid, s.p, exec);
    const auto dbl = obata_ratio(field, fine, s.p, exec);
    for (std::size_t j = 0; j < np; ++j) {
      s.finite = s.finite && std::isfinite(base[j].ratio) && std::isfinite(dbl[j].ratio);
      s.max_ratio[j] = std::max(s.max_ratio[j], base[j].ratio);
      s.max_ratio_doubled[j] = std::max(s.max_ratio_doubled[j], dbl[j].ratio);
    }
  }
  bool stable = true;
  for (std::size_t j = 0; j < np; ++j) {
    s.change.push_back(std::abs(s.max_ratio_doubled[j] / s.max_ratio[j] - 1.0));
    stable = stable && s.change.back() < kObataGridChange;
  }
  s.pass = s.finite && stable && s.linear_lhs < kObataLinearTolerance && s.linear_rhs < kObataLinearTolerance;
  return s;
}

PolyStudy run_poly_study(int n, double lambda, double step, std::size_t samples, std::uint64_t seed,
                         Execution exec) {
  PolyStudy s;
  s.n = n;
  s.lambda = lambda;
  bool ok = true;
  for (LemmaPoly which : {LemmaPoly::p, LemmaPoly::q, LemmaPoly::r}) {
    s.zeros.push_back(certify_zeros(which, n, lambda, step, exec));
    ok = ok && s.zeros.back().pass && s.zeros.back().zeros.size() == 2;
  }
  s.bounds = quotient_bounds(n, lambda, samples, 1e-6, seed, 4000, exec);
  s.discrepancy_samples = 100000;
  s.p_discrepancy = max_p_discrepancy(n, lambda, s.discrepancy_samples, seed + 1);
  s.pass = ok && s.bounds.pass && s.p_discrepancy < kPDiscrepancyTolerance;
  return s;
}

SweepFamily sweep_family(int n, const std::string& name, std::vector<double> eps) {
  return {name, family_polynomial(n, name).terms(), std::move(eps)};
}

SweepConfig default_sweep_config(int n) {
  SweepConfig cfg;
  cfg.n = n;
  cfg.p = {2.0};
  const std::vector<double> eps = {0.1, 0.05, 0.02, 0.01};
  cfg.families.push_back(sweep_family(n, "Y2", eps));
  cfg.families.push_back(sweep_family(n, "Y1+Y2", eps));
  if (n >= 4) cfg.families.push_back(sweep_family(n, "Y2s", eps));
  return cfg;
}

std::vector<FamilySummary> summarize_sweep(const std::vector<SweepRecord>& records) {
  std::vector<FamilySummary> out;
  std::map<std::string, std::size_t> index;
  std::map<std::string, double> smallest_eps;
  for (const auto& r : records) {
    auto [it, fresh] = index.try_emplace(r.family, out.size());
    if (fresh) {
      FamilySummary f;
      f.name = r.family;
      f.ratio_min = std::numeric_limits<double>::infinity();
      out.push_back(f);
      smallest_eps[r.family] = std::numeric_limits<double>::infinity();
    }
    FamilySummary& f = out[it->second];
    ++f.rows;
    f.all_ok = f.all_ok && r.status == "ok";
    const double ratio = r.ratio_main;
    f.finite = f.finite && std::isfinite(ratio);
    if (std::isfinite(ratio)) {
      f.ratio_min = std::min(f.ratio_min, ratio);
      f.ratio_max = std::max(f.ratio_max, ratio);
    }
    const auto& d = r.deficit;
    f.scalar_ratio_max = std::max(f.scalar_ratio_max, d.r_minus_avg_lp / d.ric0_lp);
    const double k = d.weyl_lp / (d.ric0_lp + std::abs(d.r_avg - r.n * (r.n - 1.0)));
    f.weyl_k = std::max(f.weyl_k, k);
    if (std::abs(r.eps) < smallest_eps[r.family]) {
      smallest_eps[r.family] = std::abs(r.eps);
      f.weyl_k_small = k;
    }
    if (std::abs(r.eps) <= 0.05) {
      f.phi_max = std::max(f.phi_max, r.phi_residual);
      f.vf_max = std::max(f.vf_max, r.vf_residual);
      f.finite = f.finite && std::isfinite(r.phi_residual) && std::isfinite(r.vf_residual);
    }
  }
  return out;
}

}  // namespace curvstab
