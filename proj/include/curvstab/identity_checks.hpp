#pragma once

// Numerical residuals of the differential and integral identities used by the stability argument.

#include "curvstab/radial_field.hpp"
#include "curvstab/sphere_grid.hpp"
#include "curvstab/surface_geometry.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace curvstab {

struct IdentityResidual {
  std::string name;
  double pointwise_max = 0.0;
  double lp_value = 0.0;
  std::vector<int> grid;
  std::string field;
};

struct BianchiResult {
  IdentityResidual contracted;  // |div Ric - dR/2|_g
  IdentityResidual traceless;   // |dR - 2n/(n-2) div ric0|_g
};

/// Pointwise contracted second Bianchi identity at one chart point, both forms, g-norms.
std::array<double, 2> bianchi_at(const RadialField& field, const ChartPoint& pt);

/// Throws DomainError when the grid's chart points cannot carry third-order data.
BianchiResult bianchi_residual(const RadialField& field, const QuadratureGrid& grid, double p,
                               const std::string& label = "", Execution exec = default_execution());

/// Order check for the analytic d Ric: central differences of the assembled Ric with steps h and
/// h/2 against the analytic derivative. The error ratio should be close to 4.
struct FdGate {
  double h = 0.0;
  double err_h = 0.0;
  double err_half = 0.0;
  double ratio = 0.0;
  bool exact = false;  // error already at roundoff level for step h
  bool pass = false;
};

FdGate bianchi_fd_gate(const RadialField& field, std::span<const double> angles, double h = 1e-2);

/// |int ((Delta f)^2 - |hess f|^2 - (n-1)|grad f|^2) dV_sigma|
double bochner_residual(const RadialField& field, const QuadratureGrid& grid,
                        Execution exec = default_execution());

/// Names of the linearization residuals, in report order.
const std::vector<std::string>& linearization_names();

/// Residuals of the first-order expansions for f = normalize_volume(eps * base), L^p_sigma norms
/// (the scalar-average entry is an absolute value). Throws DomainError unless 0 < eps <= 0.2.
std::vector<double> linearization_at(const RadialField& base, double eps, const QuadratureGrid& grid,
                                     double p, Execution exec = default_execution());

struct LinearizationStudy {
  std::vector<double> eps;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // values[name][eps]
  std::vector<double> slopes;               // least-squares log-log slope per name
  std::vector<std::vector<double>> ratios;  // consecutive ratios per name
};

LinearizationStudy linearization_residuals(const RadialField& base, std::span<const double> eps,
                                           const QuadratureGrid& grid, double p,
                                           Execution exec = default_execution());

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct ObataResult {
  double p = 2.0;
  Vec vf;
  double lhs = 0.0;  // |f - phi_{v_f}|_{W^{2,p}_sigma}
  double rhs = 0.0;  // |Delta f + n f|_{L^p_sigma}
  double ratio = 0.0;
};

/// One result per exponent; field jets are evaluated once.
std::vector<ObataResult> obata_ratio(const RadialField& field, const QuadratureGrid& grid,
                                     std::span<const double> ps, Execution exec = default_execution());
ObataResult obata_ratio(const RadialField& field, const QuadratureGrid& grid, double p,
                        Execution exec = default_execution());

/// Sum of 1 to max_terms library harmonics with degrees in [min_degree, max_degree] and
/// coefficients uniform in [-amplitude, amplitude].
RadialField random_harmonic_field(int n, std::mt19937_64& rng, int min_degree, int max_degree,
                                  int max_terms, double amplitude);

}  // namespace curvstab
