#pragma once

// Batch verification runs shared by the command-line tool and the acceptance driver.

#include "curvstab/identity_checks.hpp"
#include "curvstab/polynomial_lemmas.hpp"
#include "curvstab/stability_lab.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace curvstab {

/// Harmonic library members of degree 1..6 (first, middle and last basis element of each degree),
/// scaled by `amplitude`.
std::vector<RadialField> harmonic_test_library(int n, double amplitude = 0.1);

/// Algebraic consistency of the curvature pipeline over random band-limited fields, evaluated on
/// every node of a coarse grid. All gaps are maxima over fields and nodes.
struct PipelineCheck {
  int n = 0;
  int fields = 0;
  std::size_t nodes = 0;
  double ricci_gap = 0.0;      // |contraction of Gauss Riem - (H A - A g^-1 A)|_g / (1 + |Ric|_g)
  double norm_identity = 0.0;  // ||Riem|^2 - sum of piece norms^2| / max(1, |Riem|^2)
  double weyl_trace = 0.0;     // max |W^i_{jil}| / (1 + |Riem|_g)
  double weyl_norm = 0.0;      // |W|_g (vanishes for n = 3)
  bool pass = false;
};

PipelineCheck curvature_pipeline_check(int n, int fields, std::uint64_t seed,
                                       Execution exec = default_execution());

struct IdentitySuite {
  int n = 0;
  std::vector<int> resolution;
  double tolerance = 1e-6;
  double commutation = 0.0;
  std::vector<IdentityResidual> bianchi;  // contracted and traceless forms per library field
  double bianchi_max = 0.0;
  std::vector<FdGate> gates;
  std::vector<double> bochner;  // per random field
  double bochner_max = 0.0;
  PipelineCheck pipeline;
  LinearizationStudy linearization;
  bool bianchi_pass = false;
  bool gate_pass = false;
  bool bochner_pass = false;
  bool linearization_pass = false;
  bool pass = false;
};

inline constexpr double kBochnerTolerance = 1e-7;
inline constexpr double kSlopeTolerance = 0.1;

/// Commutation, Bianchi (library plus FD order gate), Bochner on 20 random fields, the curvature
/// pipeline cross-check and the linearization slopes of the unit-peak zonal Y_2 family.
IdentitySuite run_identity_suite(int n, std::vector<int> resolution, double tolerance,
                                 std::uint64_t seed, Execution exec = default_execution());

struct ObataStudy {
  int n = 0;
  int fields = 0;
  std::vector<double> p;
  std::vector<int> resolution;
  std::vector<int> doubled;
  double linear_lhs = 0.0;  // max over the linear probes
  double linear_rhs = 0.0;
  std::vector<double> max_ratio;          // per p, base grid
  std::vector<double> max_ratio_doubled;  // per p, doubled grid
  std::vector<double> change;             // |doubled / base - 1|
  bool finite = true;
  bool pass = false;
};

inline constexpr double kObataLinearTolerance = 1e-9;
inline constexpr double kObataGridChange = 0.05;

/// Obata ratio on random fields of degrees 2..6 on the given grid and on its doubled grid.
ObataStudy run_obata_study(int n, int fields, std::vector<double> p, std::vector<int> resolution,
                           std::uint64_t seed, Execution exec = default_execution());

struct PolyStudy {
  int n = 0;
  double lambda = 0.0;
  std::vector<ZeroReport> zeros;  // p, q, r
  BoundsReport bounds;
  std::size_t discrepancy_samples = 0;
  double p_discrepancy = 0.0;
  bool pass = false;
};

inline constexpr double kPDiscrepancyTolerance = 1e-10;

PolyStudy run_poly_study(int n, double lambda, double step, std::size_t samples, std::uint64_t seed,
                         Execution exec = default_execution());

/// Unit-peak families: zonal Y_2, Y_1 + Y_2 and the sectoral x_0^2 - x_1^2 (for n >= 4 the zonal
/// families are conformally flat, so only the sectoral one sees the Weyl tensor).
SweepFamily sweep_family(int n, const std::string& name, std::vector<double> eps);
SweepConfig default_sweep_config(int n);

struct FamilySummary {
  std::string name;
  std::size_t rows = 0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double scalar_ratio_max = 0.0;  // max r_minus_avg_lp / ric0_lp
  double weyl_k = 0.0;            // max weyl_lp / (ric0_lp + |r_avg - n(n-1)|)
  double weyl_k_small = 0.0;      // same, at the smallest eps
  double phi_max = 0.0;           // over rows with eps <= 0.05
  double vf_max = 0.0;
  bool finite = true;
  bool all_ok = true;  // every row has status ok
};

std::vector<FamilySummary> summarize_sweep(const std::vector<SweepRecord>& records);

}  // namespace curvstab
