#pragma once

// Pointwise geometry of the radial graph psi(x) = e^{f(x)} x over S^n, in the sphere chart.

#include "curvstab/curvature_algebra.hpp"
#include "curvstab/radial_field.hpp"
#include "curvstab/sphere_grid.hpp"

#include <array>
#include <span>
#include <vector>

namespace curvstab {

/// All surface quantities at one chart point. `d_g[k]` holds the chart partial d_k g_ij;
/// `christoffel_g(k, i, j)` is Gamma^k_ij of g. The curvature members (riem, ric, scalar, ric0,
/// weyl) are filled only when assembled with `curvature = true`.
struct GeometryJet {
  int n = 0;
  double f = 0.0;
  double w = 1.0;  // sqrt(1 + |grad f|^2_sigma)
  Vec position;    // psi(x)
  Vec normal;
  Mat g;
  Mat g_inv;
  Mat A;
  Mat shape;  // g^{-1} A
  double H = 0.0;
  double vol_density = 1.0;  // dV_g / dV_sigma
  std::array<Mat, kMaxDim> d_g;
  Array3 christoffel_g;
  bool curvature = false;
  Tensor4 riem;
  Mat ric;
  double scalar = 0.0;
  Mat ric0;
  Tensor4 weyl;
};

/// Throws DomainError when |grad f| or e^f overflows, NumericError if g fails to be positive
/// definite.
GeometryJet assemble(const FieldJet& jet, const ChartPoint& pt, bool curvature = true);

/// Shape operator from the expanded closed form
///   e^{-f}/W (delta - (sigma^{-1} - grad f grad f / W^2) hess f),
/// an independent route to g^{-1} A.
Mat shape_closed_form(const FieldJet& jet, const ChartPoint& pt);

/// H A - A g^{-1} A
Mat gauss_ricci(const GeometryJet& geom);

/// Induced metric only, at the given angles.
Mat induced_metric(const RadialField& field, std::span<const double> angles);

/// Max difference between the analytic Christoffel symbols of g and the standard formula fed with
/// central differences of g (step h).
double christoffel_fd_check(const RadialField& field, std::span<const double> angles, double h);

/// Chart partials of the curvature at a point, from third-order field jets.
struct CurvatureDerivatives {
  std::array<Mat, kMaxDim> d_g_inv;
  std::array<Mat, kMaxDim> d_A;
  std::array<Mat, kMaxDim> d_ric;
  Vec d_scalar;
};

/// Throws DomainError when the jet is not third order or the geometry lacks curvature.
CurvatureDerivatives curvature_derivatives(const FieldJet& jet, const ChartPoint& pt,
                                           const GeometryJet& geom);

/// Smallest eigenvalue of the pencil (A, g).
double min_generalized_eigenvalue(const Mat& a, const Mat& g);

/// Per-node data kept for the admissibility diagnostics.
struct NodeShape {
  double vol_density = 0.0;
  double a_norm = 0.0;  // sqrt(tr(shape^2))
  double min_eig = 0.0;
  std::array<double, kMaxAmbient> position{};
};

NodeShape node_shape(const GeometryJet& geom);

struct Admissibility {
  double a_inf_norm = 0.0;
  bool convexity_ok = true;
  double min_eigenvalue = 0.0;
  double volume = 0.0;
  double diameter_estimate = 0.0;  // sampled lower bound
};

inline constexpr double kConvexityTolerance = 1e-10;

Admissibility admissibility(std::span<const NodeShape> nodes, const QuadratureGrid& grid,
                            Execution exec = default_execution());
Admissibility admissibility(const RadialField& field, const QuadratureGrid& grid,
                            Execution exec = default_execution());

/// Per-node dV_g / dV_sigma.
std::vector<double> volume_density(const RadialField& field, const QuadratureGrid& grid,
                                   Execution exec = default_execution());

double surface_volume(const RadialField& field, const QuadratureGrid& grid,
                      Execution exec = default_execution());

/// Shifts f by the constant that makes the grid volume equal Vol(S^n) (scalar Newton).
/// Throws NumericError after 50 iterations without convergence.
RadialField normalize_volume(const RadialField& field, const QuadratureGrid& grid,
                             Execution exec = default_execution());

}  // namespace curvstab
