#include "curvstab/radial_field.hpp"

#include "curvstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvstab {

RadialField::RadialField(int dim, Polynomial p, double shift)
    : n(dim), poly(std::move(p)), const_shift(shift) {
  if (n < 1 || n > kMaxDim) throw DomainError("radial field dimension out of range");
  if (poly.empty()) poly = Polynomial(n + 1);
  if (poly.vars() != n + 1) {
    throw DomainError("radial field polynomial needs " + std::to_string(n + 1) + " variables");
  }
}

FieldJet eval_jet(const RadialField& field, const ChartPoint& pt, int order) {
  if (order == 0) order = pt.order;
  if (order > pt.order) throw DomainError("eval_jet: chart point lacks third-order data");
  if (pt.n != field.n) throw DomainError("eval_jet: dimension mismatch");
  const int n = pt.n;
  const int d = n + 1;

  const AmbientJet amb = field.poly.derivatives(
      {pt.ambient.data(), static_cast<std::size_t>(d)}, order);
  const Mat& jac = pt.jacobian;

  FieldJet jet;
  jet.n = n;
  jet.order = order;
  jet.value = amb.value + field.const_shift;
  jet.d1 = jac.transpose() * amb.grad;

  // d2_ij = P_ab J_ai J_bj + P_a d2x^a_ij
  const Mat pj = amb.hess * jac;  // (d x n): sum_b P_ab J_bj
  jet.d2 = jac.transpose() * pj;
  for (int a = 0; a < d; ++a) jet.d2 += amb.grad[a] * pt.d2_embed[a];

  jet.hess = jet.d2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += pt.sigma_christoffel(k, i, j) * jet.d1[k];
      jet.hess(i, j) -= s;
    }
  if (order < 3) return jet;

  // T(a, b, k) = sum_c P_abc J_ck
  Array3 pjjj(n);
  {
    Array3 t1(d);  // reuse as (a, b, k) with k < n
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int c = 0; c < d; ++c) s += amb.third(a, b, c) * jac(c, k);
          t1(a, b, k) = s;
        }
    Array3 t2(d);  // (a, j, k)
    for (int a = 0; a < d; ++a)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int b = 0; b < d; ++b) s += t1(a, b, k) * jac(b, j);
          t2(a, j, k) = s;
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int a = 0; a < d; ++a) s += t2(a, j, k) * jac(a, i);
          pjjj(i, j, k) = s;
        }
  }

  jet.d3 = Array3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = pjjj(i, j, k);
        for (int a = 0; a < d; ++a) {
          // P_ab (d2x^a_ik J_bj + J_ai d2x^b_jk + d2x^a_ij J_bk) = d2x^a_ik pj(a,j) + ... by symmetry of P_ab
          s += pt.d2_embed[a](i, k) * pj(a, j) + pj(a, i) * pt.d2_embed[a](j, k) +
               pt.d2_embed[a](i, j) * pj(a, k);
          s += amb.grad[a] * pt.d3_embed[a](i, j, k);
        }
        jet.d3(i, j, k) = s;
      }

  jet.d_hess = Array3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = jet.d3(k, i, j);
        for (int m = 0; m < n; ++m)
          s -= pt.d_sigma_christoffel(k, m, i, j) * jet.d1[m] +
               pt.sigma_christoffel(m, i, j) * jet.d2(k, m);
        jet.d_hess(k, i, j) = s;
      }

  jet.third = Array3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = jet.d_hess(k, i, j);
        for (int m = 0; m < n; ++m)
          s -= pt.sigma_christoffel(m, k, i) * jet.hess(m, j) +
               pt.sigma_christoffel(m, k, j) * jet.hess(i, m);
        jet.third(k, i, j) = s;
      }
  return jet;
}

double ricci_commutation_check(const RadialField& field, const ChartPoint& pt) {
  const FieldJet jet = eval_jet(field, pt, 3);
  const int n = pt.n;
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double lhs = jet.third(k, i, j) - jet.third(i, k, j);
        const double rhs = pt.sigma(k, j) * jet.d1[i] - pt.sigma(i, j) * jet.d1[k];
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  return worst;
}

RadialField shift_constant(const RadialField& field, double c) {
  RadialField r = field;
  r.const_shift += c;
  return r;
}

RadialField obata_field(std::span<const double> v, double shift) {
  const int n = static_cast<int>(v.size()) - 1;
  return RadialField(n, Polynomial::linear(v), shift);
}

RadialField rotate(const RadialField& field, const Mat& rotation) {
  return RadialField(field.n, field.poly.compose_linear(rotation.transpose()), field.const_shift);
}

}  // namespace curvstab
