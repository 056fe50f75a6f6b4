#pragma once

// Logarithmic radius f of a star-shaped hypersurface psi(x) = e^{f(x)} x, represented exactly as an
// ambient polynomial restricted to S^n plus a constant shift.

#include "curvstab/dense.hpp"
#include "curvstab/polynomial.hpp"
#include "curvstab/sphere_grid.hpp"

#include <span>

namespace curvstab {

struct RadialField {
  int n = 0;
  Polynomial poly;
  double const_shift = 0.0;

  RadialField() = default;
  RadialField(int dim, Polynomial p, double shift = 0.0);

  /// f at a unit vector x of R^{n+1}.
  double eval(std::span<const double> x) const { return poly.eval(x) + const_shift; }
};

/// Field jet at one chart point. Partial derivatives (d1, d2, d3) are chart derivatives of f;
/// `hess` and `third` are sigma-covariant: hess_ij = nabla_i nabla_j f and
/// third(k, i, j) = nabla_k nabla_i nabla_j f. `d_hess(k, i, j)` is the chart partial d_k of
/// the covariant Hessian components. Third-order members are present when `order == 3`.
struct FieldJet {
  int n = 0;
  int order = 0;
  double value = 0.0;
  Vec d1;
  Mat d2;
  Array3 d3;
  Mat hess;
  Array3 d_hess;
  Array3 third;

  /// |grad f|^2_sigma
  double grad_norm2(const Mat& sigma_inv) const { return d1.dot(sigma_inv * d1); }
  SphereJet sphere_jet() const { return {value, d1, hess, 2}; }
};

/// Chain rule through the chart embedding. `order` defaults to the chart point's order.
FieldJet eval_jet(const RadialField& field, const ChartPoint& pt, int order = 0);

/// max |nabla^3 f_kij - nabla^3 f_ikj - (sigma_kj f_i - sigma_ij f_k)| (curvature commutation on S^n).
double ricci_commutation_check(const RadialField& field, const ChartPoint& pt);

/// f -> f + c.
RadialField shift_constant(const RadialField& field, double c);

/// f = v . x
RadialField obata_field(std::span<const double> v, double shift = 0.0);

/// Field with f(x) = P(R^T x): the surface rotated by R.
RadialField rotate(const RadialField& field, const Mat& rotation);

}  // namespace curvstab
