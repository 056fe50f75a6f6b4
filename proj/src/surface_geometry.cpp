#include "curvstab/surface_geometry.hpp"

#include "curvstab/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvstab {
namespace {

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

// d_k sigma_ij = sigma_mj Gamma^m_ki + sigma_im Gamma^m_kj
Mat d_sigma(const ChartPoint& pt, int k) {
  const int n = pt.n;
  Mat ds = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m)
        s += pt.sigma(m, j) * pt.sigma_christoffel(m, k, i) +
             pt.sigma(i, m) * pt.sigma_christoffel(m, k, j);
      ds(i, j) = s;
    }
  return ds;
}

}  // namespace

GeometryJet assemble(const FieldJet& jet, const ChartPoint& pt, bool curvature) {
  const int n = pt.n;
  if (jet.n != n || jet.order < 2) throw DomainError("assemble: needs a second-order jet at this point");
  GeometryJet geom;
  geom.n = n;
  geom.f = jet.value;

  const double ef = std::exp(jet.value);
  const double e2f = ef * ef;
  const Vec u = pt.sigma_inv * jet.d1;
  const double grad2 = jet.d1.dot(u);
  if (!std::isfinite(e2f) || !std::isfinite(grad2) || e2f == 0.0) {
    throw DomainError("assemble: log radius or its gradient out of floating range");
  }
  const double w2 = 1.0 + grad2;
  geom.w = std::sqrt(w2);

  geom.g = e2f * (pt.sigma + jet.d1 * jet.d1.transpose());
  geom.g_inv = (pt.sigma_inv - u * u.transpose() / w2) / e2f;
  Eigen::LLT<Mat> llt(geom.g);
  if (llt.info() != Eigen::Success) throw NumericError("assemble: induced metric not positive definite");

  geom.position = ef * pt.ambient;
  geom.normal = (pt.ambient - pt.jacobian * u) / geom.w;

  geom.A = symmetrized((ef / geom.w) * (pt.sigma + jet.d1 * jet.d1.transpose() - jet.hess));
  geom.shape = geom.g_inv * geom.A;
  geom.H = geom.shape.trace();
  geom.vol_density = std::exp(n * jet.value) * geom.w;

  for (int k = 0; k < n; ++k) {
    const Mat dcross = jet.d2.col(k) * jet.d1.transpose() + jet.d1 * jet.d2.row(k);
    geom.d_g[k] = 2.0 * jet.d1[k] * geom.g + e2f * (d_sigma(pt, k) + dcross);
  }
  geom.christoffel_g = Array3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += geom.g_inv(k, l) * (geom.d_g[i](j, l) + geom.d_g[j](i, l) - geom.d_g[l](i, j));
        geom.christoffel_g(k, i, j) = 0.5 * s;
      }

  if (!curvature) return geom;
  geom.curvature = true;
  geom.riem = combine(0.5, kn_product(geom.A, geom.A), 0.0, Tensor4(n));
  geom.ric = symmetrized(ricci_contraction(geom.riem, geom.g_inv));
  geom.scalar = geom.g_inv.cwiseProduct(geom.ric).sum();
  geom.ric0 = geom.ric - (geom.scalar / n) * geom.g;
  if (n >= 3) {
    geom.weyl = decompose(geom.riem, geom.g, geom.scalar, geom.ric0).weyl;
  } else {
    geom.weyl = Tensor4(n);
  }
  return geom;
}

Mat shape_closed_form(const FieldJet& jet, const ChartPoint& pt) {
  const int n = pt.n;
  const Vec u = pt.sigma_inv * jet.d1;
  const double w2 = 1.0 + jet.d1.dot(u);
  const Mat raised = pt.sigma_inv - u * u.transpose() / w2;
  return std::exp(-jet.value) / std::sqrt(w2) * (Mat::Identity(n, n) - raised * jet.hess);
}

Mat gauss_ricci(const GeometryJet& geom) {
  return geom.H * geom.A - geom.A * geom.g_inv * geom.A;
}

Mat induced_metric(const RadialField& field, std::span<const double> angles) {
  const ChartPoint pt = build_chart_point(angles, 2);
  const FieldJet jet = eval_jet(field, pt, 2);
  return std::exp(2.0 * jet.value) * (pt.sigma + jet.d1 * jet.d1.transpose());
}

double christoffel_fd_check(const RadialField& field, std::span<const double> angles, double h) {
  if (!(h > 0.0)) throw DomainError("christoffel_fd_check: step must be positive");
  const ChartPoint pt = build_chart_point(angles, 2);
  const GeometryJet geom = assemble(eval_jet(field, pt, 2), pt, false);
  const int n = pt.n;
  std::array<Mat, kMaxDim> dg;
  std::vector<double> shifted(angles.begin(), angles.end());
  for (int l = 0; l < n; ++l) {
    shifted[l] = angles[l] + h;
    const Mat plus = induced_metric(field, shifted);
    shifted[l] = angles[l] - h;
    const Mat minus = induced_metric(field, shifted);
    shifted[l] = angles[l];
    dg[l] = (plus - minus) / (2.0 * h);
  }
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += geom.g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        worst = std::max(worst, std::abs(0.5 * s - geom.christoffel_g(k, i, j)));
      }
  return worst;
}

CurvatureDerivatives curvature_derivatives(const FieldJet& jet, const ChartPoint& pt,
                                           const GeometryJet& geom) {
  if (jet.order < 3) throw DomainError("curvature_derivatives: needs third-order field jets");
  if (!geom.curvature) throw DomainError("curvature_derivatives: geometry assembled without curvature");
  const int n = pt.n;
  const double ef = std::exp(jet.value);
  const Vec u = pt.sigma_inv * jet.d1;

  CurvatureDerivatives out;
  out.d_scalar = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    const double dw = jet.hess.row(k).dot(u) / geom.w;
    Mat db = d_sigma(pt, k) + jet.d2.col(k) * jet.d1.transpose() + jet.d1 * jet.d2.row(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) db(i, j) -= jet.d_hess(k, i, j);
    const Mat da = geom.A * (jet.d1[k] - dw / geom.w) + (ef / geom.w) * db;
    const Mat dginv = -geom.g_inv * geom.d_g[k] * geom.g_inv;
    const double dh = (dginv * geom.A + geom.g_inv * da).trace();
    const Mat dric = dh * geom.A + geom.H * da - da * geom.g_inv * geom.A - geom.A * dginv * geom.A -
                     geom.A * geom.g_inv * da;
    out.d_A[k] = da;
    out.d_g_inv[k] = dginv;
    out.d_ric[k] = dric;
    out.d_scalar[k] = dginv.cwiseProduct(geom.ric).sum() + geom.g_inv.cwiseProduct(dric).sum();
  }
  return out;
}

double min_generalized_eigenvalue(const Mat& a, const Mat& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(a, g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("generalized eigenproblem failed");
  return solver.eigenvalues().minCoeff();
}

NodeShape node_shape(const GeometryJet& geom) {
  NodeShape s;
  s.vol_density = geom.vol_density;
  const double t = (geom.shape * geom.shape).trace();
  s.a_norm = t > 0.0 ? std::sqrt(t) : 0.0;
  s.min_eig = min_generalized_eigenvalue(geom.A, geom.g);
  for (int a = 0; a <= geom.n; ++a) s.position[a] = geom.position[a];
  return s;
}

Admissibility admissibility(std::span<const NodeShape> nodes, const QuadratureGrid& grid,
                            Execution exec) {
  if (nodes.size() != grid.size()) throw DomainError("admissibility: one entry per node required");
  Admissibility adm;
  std::vector<double> dens(nodes.size());
  adm.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    dens[i] = nodes[i].vol_density;
    adm.a_inf_norm = std::max(adm.a_inf_norm, nodes[i].a_norm);
    adm.min_eigenvalue = std::min(adm.min_eigenvalue, nodes[i].min_eig);
  }
  adm.convexity_ok = adm.min_eigenvalue >= -kConvexityTolerance;
  adm.volume = integrate(dens, grid, exec);

  // Lower bound on the extrinsic diameter from a strided subset of nodes.
  constexpr std::size_t kSample = 600;
  const std::size_t stride = std::max<std::size_t>(1, nodes.size() / kSample);
  const int d = grid.n + 1;
  double best = 0.0;
  for (std::size_t i = 0; i < nodes.size(); i += stride)
    for (std::size_t j = i + stride; j < nodes.size(); j += stride) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        const double diff = nodes[i].position[a] - nodes[j].position[a];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  adm.diameter_estimate = std::sqrt(best);
  return adm;
}

Admissibility admissibility(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  std::vector<NodeShape> nodes(grid.size());
  map_nodes(
      grid.size(),
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        nodes[i] = node_shape(assemble(eval_jet(field, pt, 2), pt, false));
      },
      exec);
  return admissibility(nodes, grid, exec);
}

std::vector<double> volume_density(const RadialField& field, const QuadratureGrid& grid,
                                   Execution exec) {
  std::vector<double> dens(grid.size());
  map_nodes(
      grid.size(),
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const FieldJet jet = eval_jet(field, pt, 2);
        dens[i] = std::exp(field.n * jet.value) * std::sqrt(1.0 + jet.grad_norm2(pt.sigma_inv));
      },
      exec);
  return dens;
}

double surface_volume(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  return integrate(volume_density(field, grid, exec), grid, exec);
}

RadialField normalize_volume(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  if (field.n != grid.n) throw DomainError("normalize_volume: dimension mismatch");
  const double v0 = surface_volume(field, grid, exec);
  const double target = sphere_volume(field.n);
  const int n = field.n;
  // V(c) = e^{nc} V(0); Newton on V(c) - target.
  double c = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double v = std::exp(n * c) * v0;
    if (std::abs(v - target) <= 1e-14 * target) return shift_constant(field, c);
    c -= (v - target) / (n * v);
  }
  throw NumericError("normalize_volume: Newton did not converge");
}

}  // namespace curvstab
