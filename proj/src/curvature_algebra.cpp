#include "curvstab/curvature_algebra.hpp"

#include "curvstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvstab {
namespace {

void require_symmetric(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError(std::string(what) + " is not symmetric");
  }
}

// Raises one index of t with g_inv, in slot `slot`.
Tensor4 raise_slot(const Tensor4& t, const Mat& g_inv, int slot) {
  const int n = t.dim();
  Tensor4 r(n);
  int idx[4];
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3]) {
          int src[4] = {idx[0], idx[1], idx[2], idx[3]};
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            src[slot] = m;
            s += g_inv(idx[slot], m) * t(src[0], src[1], src[2], src[3]);
          }
          r(idx[0], idx[1], idx[2], idx[3]) = s;
        }
  return r;
}

}  // namespace

Tensor4 kn_product(const Mat& a, const Mat& b) {
  require_symmetric(a, "kn_product: first factor");
  require_symmetric(b, "kn_product: second factor");
  if (a.rows() != b.rows()) throw DomainError("kn_product: dimension mismatch");
  const int n = static_cast<int>(a.rows());
  if (n > kMaxDim) throw DomainError("kn_product: dimension above capacity");
  Tensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          t(i, j, k, l) = a(i, k) * b(j, l) + a(j, l) * b(i, k) - a(i, l) * b(j, k) - a(j, k) * b(i, l);
  return t;
}

double inner4(const Tensor4& t, const Tensor4& s, const Mat& g_inv) {
  const int n = t.dim();
  if (s.dim() != n || g_inv.rows() != n || g_inv.cols() != n) {
    throw DomainError("inner4: dimension mismatch");
  }
  Tensor4 r = s;
  for (int slot = 0; slot < 4; ++slot) r = raise_slot(r, g_inv, slot);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) sum += t(i, j, k, l) * r(i, j, k, l);
  return sum;
}

double norm4(const Tensor4& t, const Mat& g_inv) {
  const double v = inner4(t, t, g_inv);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

Mat ricci_contraction(const Tensor4& t, const Mat& g_inv) {
  const int n = t.dim();
  Mat ric = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += g_inv(i, k) * t(i, j, k, l);
      ric(j, l) = s;
    }
  return ric;
}

double riemann_symmetry_defect(const Tensor4& t) {
  const int n = t.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = t(i, j, k, l);
          worst = std::max({worst, std::abs(v + t(j, i, k, l)), std::abs(v + t(i, j, l, k)),
                            std::abs(v - t(k, l, i, j)),
                            std::abs(v + t(j, k, i, l) + t(k, i, j, l))});
        }
  return worst;
}

RiemannPieces decompose(const Tensor4& riem, const Mat& g, double scalar, const Mat& ric0) {
  const int n = riem.dim();
  if (n < 3) throw DomainError("Riemann decomposition needs n >= 3");
  RiemannPieces pieces;
  const Tensor4 gg = kn_product(g, g);
  const Tensor4 rg = kn_product(ric0, g);
  pieces.scalar_part = combine(scalar / (2.0 * n * (n - 1)), gg, 0.0, gg);
  pieces.ric0_part = combine(1.0 / (n - 2), rg, 0.0, rg);
  pieces.weyl = combine(1.0, riem, -1.0, combine(1.0, pieces.scalar_part, 1.0, pieces.ric0_part));
  return pieces;
}

Tensor4 weyl_from_decomposition(const Tensor4& riem, const Mat& g, const Mat& g_inv, double scalar,
                                const Mat& ric0) {
  const double trace = g_inv.cwiseProduct(ric0).sum();
  const double scale = std::max(1.0, ric0.cwiseAbs().maxCoeff());
  if (std::abs(trace) > 1e-9 * scale) throw DomainError("weyl_from_decomposition: ric0 is not trace-free");
  return decompose(riem, g, scalar, ric0).weyl;
}

Tensor4 combine(double a, const Tensor4& t, double b, const Tensor4& s) {
  const int n = t.dim();
  Tensor4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r(i, j, k, l) = a * t(i, j, k, l) + b * s(i, j, k, l);
  return r;
}

}  // namespace curvstab
