#pragma once

// Deficit norms, recentering and closeness norms of radial graphs, and the sweep driver.

#include "curvstab/polynomial.hpp"
#include "curvstab/radial_field.hpp"
#include "curvstab/sphere_grid.hpp"
#include "curvstab/surface_geometry.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace curvstab {

/// Value-level log radius x -> f(x) on S^n.
using LogRadius = std::function<double(std::span<const double>)>;

LogRadius log_radius(const RadialField& field);

/// Log radius of the unit sphere centred at a, seen from the origin (needs |a| < 1):
/// rho(x) = x.a + sqrt((x.a)^2 + 1 - |a|^2).
LogRadius offset_sphere(const Vec& a);

struct DeficitReport {
  int n = 0;
  double p = 2.0;
  double ric0_lp = 0.0;
  double weyl_lp = 0.0;
  double r_minus_avg_lp = 0.0;
  double r_avg = 0.0;
  double a_inf_norm = 0.0;
  double volume = 0.0;
  double diameter_estimate = 0.0;
  bool convexity_ok = true;
  double min_eigenvalue = 0.0;
};

/// Per-node pointwise data behind a DeficitReport; independent of p.
struct DeficitNodes {
  std::vector<double> ric0;    // |ric0|_g
  std::vector<double> weyl;    // |W|_g
  std::vector<double> scalar;  // R
  std::vector<double> density; // dV_g / dV_sigma
  std::vector<NodeShape> shapes;
};

DeficitNodes deficit_nodes(const RadialField& field, const QuadratureGrid& grid,
                           Execution exec = default_execution());
DeficitReport summarize_deficits(const DeficitNodes& nodes, const QuadratureGrid& grid, double p,
                                 Execution exec = default_execution());
DeficitReport deficits(const RadialField& field, const QuadratureGrid& grid, double p,
                       Execution exec = default_execution());

struct RayTrace {
  Vec x_c;
  double f_c = 0.0;
  int iterations = 0;
};

/// Finds x_c on S^n with psi(x_c) - c = e^{f_c(z)} z by iterating the ray intersection
///   t = -(z.c) + sqrt((z.c)^2 + rho(x)^2 - |c|^2),   x <- unit(t z + c)
/// from x = z until the step is below 1e-12 (at most 200 iterations).
/// Throws NumericError when the cap is hit or the ray misses.
RayTrace ray_trace_recenter(const LogRadius& f, const Vec& c, std::span<const double> z);

/// Phi(c) = -(n + 1) avg_sigma(z f_c(z)).
Vec phi_map(const LogRadius& f, const Vec& c, const QuadratureGrid& grid,
            Execution exec = default_execution());

struct CenterSolve {
  Vec c0;
  double phi_residual = 0.0;
  int iterations = 0;
  int fallback_steps = 0;
  std::vector<double> trace;  // |Phi| after each step
};

/// Newton on Phi with forward-difference Jacobian (step 1e-6), |c| clamped to 0.3 min rho,
/// falling back to the damped fixed point c <- c - Phi(c). Throws NumericError after 50 steps.
CenterSolve solve_center(const LogRadius& f, const QuadratureGrid& grid,
                         Execution exec = default_execution());
CenterSolve solve_center(const RadialField& field, const QuadratureGrid& grid,
                         Execution exec = default_execution());

inline constexpr double kPhiTolerance = 1e-9;
inline constexpr double kClosenessStep = 1e-3;

/// Per-node magnitudes for the closeness norms; independent of p.
struct ClosenessNodes {
  std::vector<JetMagnitudes> f_c0;
  std::vector<std::array<JetMagnitudes, kMaxAmbient>> psi;  // components of psi - id - c0
  std::vector<JetMagnitudes> pullback;                     // psi^* g - sigma, order 1
  std::vector<double> f_c0_values;
};

/// f_c0 jets from central differences (step h) of ray-traced values. Throws DomainError when the
/// stencil would leave the chart.
ClosenessNodes closeness_nodes(const LogRadius& f, const Vec& c0, const QuadratureGrid& grid,
                               double h = kClosenessStep, Execution exec = default_execution());

struct Closeness {
  double f_c0_w2p = 0.0;
  double psi_minus_id_w2p = 0.0;
  double pullback_w1p = 0.0;
};

Closeness summarize_closeness(const ClosenessNodes& nodes, const QuadratureGrid& grid, double p,
                              Execution exec = default_execution());
Closeness closeness_norms(const LogRadius& f, const Vec& c0, const QuadratureGrid& grid, double p,
                          Execution exec = default_execution());

/// Jet of f_c at one chart point by central differences of ray-traced values.
SphereJet recentered_jet(const LogRadius& f, const Vec& c, std::span<const double> angles, double h);

struct SweepFamily {
  std::string name;
  std::vector<Term> terms;
  std::vector<double> eps;
};

struct SweepConfig {
  int n = 3;
  std::vector<double> p;
  std::vector<SweepFamily> families;
  std::vector<int> resolution;
  std::uint64_t seed = 0;
};

struct SweepRecord {
  int case_id = 0;
  int n = 0;
  double p = 0.0;
  double eps = 0.0;
  std::string family;
  DeficitReport deficit;
  double c0_norm = 0.0;
  Vec c0;
  double phi_residual = 0.0;
  double vf_residual = 0.0;  // |v_{f_c0}|
  double f_c0_w2p = 0.0;
  double psi_minus_id_w2p = 0.0;
  double pullback_w1p = 0.0;
  double ratio_main = 0.0;
  double ratio_cor = 0.0;
  int newton_iters = 0;
  std::string status;  // ok, solver_error, nonconvex
};

/// Cases in order family, eps, p; case_id counts from 0. Per-case failures are recorded in the row.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, Execution exec = default_execution());

const std::string& csv_header();
/// One CSV line (no trailing newline), floats with 17 significant digits.
std::string csv_row(const SweepRecord& record);
void write_csv(std::ostream& out, std::span<const SweepRecord> records);

}  // namespace curvstab
