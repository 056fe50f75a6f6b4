#include "curvstab/identity_checks.hpp"

#include "curvstab/errors.hpp"
#include "curvstab/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvstab {
namespace {

// g^{ki} (d_k T_ij - Gamma^m_ki T_mj - Gamma^m_kj T_im)
Vec divergence(const Mat& t, const std::array<Mat, kMaxDim>& dt, const GeometryJet& geom) {
  const int n = geom.n;
  Vec div = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double cov = dt[k](i, j);
        for (int m = 0; m < n; ++m)
          cov -= geom.christoffel_g(m, k, i) * t(m, j) + geom.christoffel_g(m, k, j) * t(i, m);
        s += geom.g_inv(k, i) * cov;
      }
    div[j] = s;
  }
  return div;
}

// Cyclic shift s maps x to y with y_k = x_{(k + s) mod (n + 1)}. The nested chart degenerates on
// {y_{n-1} = y_n = 0}; the shift that moves the largest consecutive pair (x_i, x_{i+1}) into the
// last two slots keeps every polar angle above ~0.7 (the pair carries at least 2/(n+1) of |x|^2).
int best_cyclic_shift(std::span<const double> x) {
  const int d = static_cast<int>(x.size());
  int best = 0;
  double best_mass = -1.0;
  for (int i = 0; i < d; ++i) {
    const double mass = x[i] * x[i] + x[(i + 1) % d] * x[(i + 1) % d];
    if (mass > best_mass) {
      best_mass = mass;
      best = (i + 2) % d;
    }
  }
  return best;
}

Mat cyclic_shift(int d, int s) {
  Mat p = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) p(k, (k + s) % d) = 1.0;
  return p;
}

}  // namespace

std::array<double, 2> bianchi_at(const RadialField& field, const ChartPoint& pt) {
  const FieldJet jet = eval_jet(field, pt, 3);
  const GeometryJet geom = assemble(jet, pt, true);
  const CurvatureDerivatives dc = curvature_derivatives(jet, pt, geom);
  const int n = pt.n;

  const Vec div_ric = divergence(geom.ric, dc.d_ric, geom);
  const Vec contracted = div_ric - 0.5 * dc.d_scalar;

  std::array<Mat, kMaxDim> d_ric0;
  for (int k = 0; k < n; ++k)
    d_ric0[k] = dc.d_ric[k] - (dc.d_scalar[k] / n) * geom.g - (geom.scalar / n) * geom.d_g[k];
  const Vec div_ric0 = divergence(geom.ric0, d_ric0, geom);
  const Vec traceless = dc.d_scalar - (2.0 * n / (n - 2.0)) * div_ric0;

  return {norm1(contracted, geom.g_inv), norm1(traceless, geom.g_inv)};
}

BianchiResult bianchi_residual(const RadialField& field, const QuadratureGrid& grid, double p,
                               const std::string& label, Execution exec) {
  if (field.n != grid.n) throw DomainError("bianchi_residual: dimension mismatch");
  if (field.n < 3) throw DomainError("bianchi_residual: needs n >= 3");
  const int d = field.n + 1;
  // residuals are isometry invariants; evaluate each node in a well-conditioned shifted chart
  std::vector<RadialField> shifted;
  std::vector<Mat> shifts;
  for (int s = 0; s < d; ++s) {
    shifts.push_back(cyclic_shift(d, s));
    shifted.push_back(rotate(field, shifts.back()));
  }
  const std::size_t count = grid.size();
  std::vector<double> r1(count), r2(count), dens(count);
  map_nodes(
      count,
      [&](std::size_t i) {
        const int s = best_cyclic_shift(grid.ambient(i));
        const Vec x = Eigen::Map<const Vec>(grid.ambient(i).data(), d);
        const Vec y = shifts[s] * x;
        const Vec angles = chart_angles({y.data(), static_cast<std::size_t>(d)});
        const ChartPoint pt = build_chart_point({angles.data(), static_cast<std::size_t>(field.n)}, 3);
        const auto r = bianchi_at(shifted[s], pt);
        r1[i] = r[0];
        r2[i] = r[1];
        const FieldJet jet = eval_jet(shifted[s], pt, 1);
        dens[i] = std::exp(field.n * jet.value) * std::sqrt(1.0 + jet.grad_norm2(pt.sigma_inv));
      },
      exec);
  BianchiResult out;
  out.contracted = {"bianchi_contracted", *std::max_element(r1.begin(), r1.end()),
                    lp_norm(r1, p, grid, std::span<const double>(dens), exec), grid.resolution, label};
  out.traceless = {"bianchi_traceless", *std::max_element(r2.begin(), r2.end()),
                   lp_norm(r2, p, grid, std::span<const double>(dens), exec), grid.resolution, label};
  return out;
}

FdGate bianchi_fd_gate(const RadialField& field, std::span<const double> angles, double h) {
  const ChartPoint pt = build_chart_point(angles, 3);
  const FieldJet jet = eval_jet(field, pt, 3);
  const GeometryJet geom = assemble(jet, pt, true);
  const CurvatureDerivatives dc = curvature_derivatives(jet, pt, geom);
  const int n = pt.n;

  auto ric_at = [&](const std::vector<double>& a) {
    const ChartPoint q = build_chart_point(a, 2);
    return assemble(eval_jet(field, q, 2), q, true).ric;
  };
  auto error_for = [&](double step) {
    double worst = 0.0;
    std::vector<double> a(angles.begin(), angles.end());
    for (int k = 0; k < n; ++k) {
      a[k] = angles[k] + step;
      const Mat plus = ric_at(a);
      a[k] = angles[k] - step;
      const Mat minus = ric_at(a);
      a[k] = angles[k];
      worst = std::max(worst, ((plus - minus) / (2.0 * step) - dc.d_ric[k]).cwiseAbs().maxCoeff());
    }
    return worst;
  };

  FdGate gate;
  gate.h = h;
  gate.err_h = error_for(h);
  gate.err_half = error_for(0.5 * h);
  const double scale = std::max(1.0, geom.ric.cwiseAbs().maxCoeff());
  gate.exact = gate.err_h < 1e-10 * scale;
  gate.ratio = gate.err_half > 0.0 ? gate.err_h / gate.err_half : std::numeric_limits<double>::infinity();
  gate.pass = gate.exact || (gate.ratio >= 3.6 && gate.ratio <= 4.4);
  return gate;
}

double bochner_residual(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  if (field.n != grid.n) throw DomainError("bochner_residual: dimension mismatch");
  const int n = field.n;
  std::vector<double> integrand(grid.size());
  map_nodes(
      grid.size(),
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const FieldJet jet = eval_jet(field, pt, 2);
        const double lap = pt.sigma_inv.cwiseProduct(jet.hess).sum();
        integrand[i] = lap * lap - inner2(jet.hess, jet.hess, pt.sigma_inv) -
                       (n - 1.0) * jet.grad_norm2(pt.sigma_inv);
      },
      exec);
  return std::abs(integrate(integrand, grid, exec));
}

const std::vector<std::string>& linearization_names() {
  static const std::vector<std::string> names = {"second_fundamental_form", "metric", "inverse_metric",
                                                 "scalar_curvature", "scalar_average", "trace_deficit"};
  return names;
}

std::vector<double> linearization_at(const RadialField& base, double eps, const QuadratureGrid& grid,
                                     double p, Execution exec) {
  if (!(eps > 0.0) || eps > 0.2) throw DomainError("linearization: eps must lie in (0, 0.2]");
  if (base.n != grid.n) throw DomainError("linearization: dimension mismatch");
  const int n = base.n;
  const RadialField scaled(n, base.poly.scaled(eps), eps * base.const_shift);
  const RadialField field = normalize_volume(scaled, grid, exec);

  const std::size_t count = grid.size();
  std::vector<double> ra(count), rg(count), rgi(count), rr(count), rt(count), scal(count), dens(count);
  map_nodes(
      count,
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const FieldJet jet = eval_jet(field, pt, 2);
        const GeometryJet geom = assemble(jet, pt, true);
        const double f = jet.value;
        const Mat& sigma = pt.sigma;
        const double lap = pt.sigma_inv.cwiseProduct(jet.hess).sum();
        const double hess2 = inner2(jet.hess, jet.hess, pt.sigma_inv);

        ra[i] = norm2(geom.A - (sigma - jet.hess + f * sigma), pt.sigma_inv);
        rg[i] = norm2(geom.g - (1.0 + 2.0 * f) * sigma, pt.sigma_inv);
        rgi[i] = norm2(geom.g_inv - (1.0 - 2.0 * f) * pt.sigma_inv, sigma);
        const double r_lin = n * (n - 1.0) - 2.0 * (n - 1.0) * lap + lap * lap - hess2 - 2.0 * n * (n - 1.0) * f;
        rr[i] = geom.scalar - r_lin;
        rt[i] = pt.sigma_inv.cwiseProduct(geom.A - geom.g).sum() + lap + n * f;
        scal[i] = geom.scalar * geom.vol_density;
        dens[i] = geom.vol_density;
      },
      exec);
  const double r_avg = integrate(scal, grid, exec) / integrate(dens, grid, exec);
  return {lp_norm(ra, p, grid, std::nullopt, exec),  lp_norm(rg, p, grid, std::nullopt, exec),
          lp_norm(rgi, p, grid, std::nullopt, exec), lp_norm(rr, p, grid, std::nullopt, exec),
          std::abs(r_avg - n * (n - 1.0)),           lp_norm(rt, p, grid, std::nullopt, exec)};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / m;
    my += std::log(y[i]) / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

LinearizationStudy linearization_residuals(const RadialField& base, std::span<const double> eps,
                                           const QuadratureGrid& grid, double p, Execution exec) {
  LinearizationStudy study;
  study.eps.assign(eps.begin(), eps.end());
  study.names = linearization_names();
  study.values.assign(study.names.size(), std::vector<double>(eps.size()));
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const auto row = linearization_at(base, eps[e], grid, p, exec);
    for (std::size_t k = 0; k < row.size(); ++k) study.values[k][e] = row[k];
  }
  for (std::size_t k = 0; k < study.names.size(); ++k) {
    study.slopes.push_back(eps.size() >= 2 ? loglog_slope(eps, study.values[k])
                                           : std::numeric_limits<double>::quiet_NaN());
    std::vector<double> ratios;
    for (std::size_t e = 0; e + 1 < eps.size(); ++e) ratios.push_back(study.values[k][e] / study.values[k][e + 1]);
    study.ratios.push_back(std::move(ratios));
  }
  return study;
}

std::vector<ObataResult> obata_ratio(const RadialField& field, const QuadratureGrid& grid,
                                     std::span<const double> ps, Execution exec) {
  if (field.n != grid.n) throw DomainError("obata_ratio: dimension mismatch");
  const int n = field.n;
  const std::size_t count = grid.size();

  std::vector<double> values(count);
  map_nodes(count, [&](std::size_t i) { values[i] = field.eval(grid.ambient(i)); }, exec);
  const Vec vf = first_moment(values, grid, exec);

  std::vector<double> v(vf.data(), vf.data() + vf.size());
  const RadialField residual(n, field.poly - Polynomial::linear(v), field.const_shift);
  std::vector<JetMagnitudes> mags(count);
  std::vector<double> deficit(count);
  map_nodes(
      count,
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const FieldJet jet = eval_jet(residual, pt, 2);
        mags[i] = magnitudes(jet.sphere_jet(), pt.sigma_inv);
        deficit[i] = pt.sigma_inv.cwiseProduct(jet.hess).sum() + n * jet.value;
      },
      exec);

  std::vector<ObataResult> out;
  for (double p : ps) {
    ObataResult r;
    r.p = p;
    r.vf = vf;
    r.lhs = sobolev_norm(mags, 2, p, grid, exec);
    r.rhs = lp_norm(deficit, p, grid, std::nullopt, exec);
    if (r.rhs < 1e-14) {
      r.ratio = r.lhs > 1e-10 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      r.ratio = r.lhs / r.rhs;
    }
    out.push_back(r);
  }
  return out;
}

ObataResult obata_ratio(const RadialField& field, const QuadratureGrid& grid, double p, Execution exec) {
  const double ps[] = {p};
  return obata_ratio(field, grid, ps, exec).front();
}

RadialField random_harmonic_field(int n, std::mt19937_64& rng, int min_degree, int max_degree,
                                  int max_terms, double amplitude) {
  const auto& lib = harmonic_library(n);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < lib.size(); ++i)
    if (lib[i].degree >= min_degree && lib[i].degree <= max_degree) eligible.push_back(i);
  if (eligible.empty() || max_terms < 1) throw DomainError("random_harmonic_field: empty degree range");
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::uniform_real_distribution<double> coeff(-amplitude, amplitude);
  Polynomial poly(n + 1);
  const int k = nterms(rng);
  for (int t = 0; t < k; ++t) poly = poly + lib[eligible[pick(rng)]].normalized.scaled(coeff(rng));
  return RadialField(n, poly);
}

}  // namespace curvstab
