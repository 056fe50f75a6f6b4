#pragma once

// Charts, embeddings and product quadrature on the unit sphere S^n in R^{n+1}.
//
// Chart: nested spherical coordinates
//   x_0 = cos t_0
//   x_a = sin t_0 ... sin t_{a-1} cos t_a      (1 <= a <= n-1)
//   x_n = sin t_0 ... sin t_{n-1}
// with t_0..t_{n-2} polar in (0, pi) and t_{n-1} periodic. Every ambient coordinate is a product
// of univariate factors, so all embedding derivatives are closed-form trigonometric products.

#include "curvstab/dense.hpp"
#include "curvstab/reduction.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace curvstab {

/// Polar angles closer than this to 0 or pi are rejected.
inline constexpr double kChartSingularityGuard = 1e-6;

/// A point of S^n together with the chart apparatus around it.
///
/// Index conventions: `jacobian(a, i) = dx^a/dt^i`, `d2_embed[a](i, j)`, `d3_embed[a](i, j, k)`,
/// `sigma_christoffel(k, i, j) = Gamma^k_ij`, `d_sigma_christoffel(m, k, i, j) = d_m Gamma^k_ij`.
/// Third-order data (d3_embed, d_sigma_christoffel) is only filled when `order == 3`.
struct ChartPoint {
  int n = 0;
  int order = 0;
  Vec angles;
  Vec ambient;
  Mat jacobian;
  std::array<Mat, kMaxAmbient> d2_embed;
  std::array<Array3, kMaxAmbient> d3_embed;
  Mat sigma;
  Mat sigma_inv;
  Array3 sigma_christoffel;
  Array4 d_sigma_christoffel;
};

/// Builds the chart point at the given angles. `order` is 2 or 3.
/// Throws DomainError for a polar angle at or beyond a chart singularity.
ChartPoint build_chart_point(std::span<const double> angles, int order = 3);

/// Embedding S^n -> R^{n+1} of the chart (values only).
Vec embed(std::span<const double> angles);

/// Inverse of `embed` for a unit vector; the periodic angle is returned in [0, 2 pi).
Vec chart_angles(std::span<const double> x);

struct QuadratureNode {
  std::array<double, kMaxDim> angles{};
  std::array<double, kMaxAmbient> ambient{};
  double weight = 0.0;
};

/// Product quadrature on S^n: Gauss-Legendre in each polar angle, trapezoid in the periodic one.
/// Nodes are stored compactly; the chart apparatus is rebuilt on demand with `chart_point`.
struct QuadratureGrid {
  int n = 0;
  std::vector<int> resolution;
  std::vector<QuadratureNode> nodes;
  double total_weight = 0.0;

  std::size_t size() const { return nodes.size(); }
  ChartPoint chart_point(std::size_t i, int order = 3) const;
  std::span<const double> angles(std::size_t i) const {
    return {nodes[i].angles.data(), static_cast<std::size_t>(n)};
  }
  std::span<const double> ambient(std::size_t i) const {
    return {nodes[i].ambient.data(), static_cast<std::size_t>(n + 1)};
  }
  /// Smallest distance from any polar node angle to a chart singularity.
  double min_pole_distance() const;
};

/// Expands a one-entry resolution {r} to {r, ..., r, 2r}; otherwise returns it unchanged.
std::vector<int> expand_resolution(int n, std::vector<int> resolution);

/// Default resolution used throughout: 24x24x48 for n = 3, 16^3 x 32 for n = 4, 10^(n-1) x 20 above.
std::vector<int> default_resolution(int n);

/// Throws DomainError when n < 3 or any resolution entry is below 4.
QuadratureGrid build_grid(int n, std::vector<int> resolution);

/// Gauss nodes (ascending) and weights on [-1, 1] for the weight (1 - t^2)^a, a > -1. a = 0 is Gauss-Legendre.
void gauss_gegenbauer(int count, double a, std::vector<double>& nodes, std::vector<double>& weights);

/// Vol(S^n).
double sphere_volume(int n);

/// Closed-form integral over S^n of prod_a x_a^{e_a}.
double sphere_monomial_integral(std::span<const int> exponents);

/// Weighted quadrature sum with the fixed pairwise tree.
double integrate(std::span<const double> values, const QuadratureGrid& grid,
                 Execution exec = default_execution());

/// integrate(values) / integrate(1).
double average(std::span<const double> values, const QuadratureGrid& grid,
               Execution exec = default_execution());

/// (n + 1) * average(z f): the coefficient vector of the degree-1 part of f.
Vec first_moment(std::span<const double> values, const QuadratureGrid& grid,
                 Execution exec = default_execution());

/// (sum |v|^p w rho)^{1/p}; rho is the optional density dV_g / dV_sigma.
double lp_norm(std::span<const double> values, double p, const QuadratureGrid& grid,
               std::optional<std::span<const double>> density = std::nullopt,
               Execution exec = default_execution());

/// Covariant jet of a scalar function on (S^n, sigma) in chart components.
/// `order` says how many derivative levels are present (0, 1 or 2).
struct SphereJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
  int order = 0;
};

/// Pointwise sigma-norms |f|, |grad f|, |hess f| of a jet.
struct JetMagnitudes {
  double value = 0.0;
  double grad = 0.0;
  double hess = 0.0;
  int order = 0;
};

JetMagnitudes magnitudes(const SphereJet& jet, const Mat& sigma_inv);

/// (sum_{j <= k} int |nabla^j f|^p_sigma dV_sigma)^{1/p}.
/// Throws DomainError when a jet lacks derivative order k, or p <= 1.
double sobolev_norm(std::span<const JetMagnitudes> jets, int k, double p,
                    const QuadratureGrid& grid, Execution exec = default_execution());

/// Per-level integrals int |nabla^j f|^p dV_sigma, j = 0..k (before the 1/p root).
std::array<double, 3> sobolev_parts(std::span<const JetMagnitudes> jets, int k, double p,
                                    const QuadratureGrid& grid, Execution exec = default_execution());

}  // namespace curvstab
