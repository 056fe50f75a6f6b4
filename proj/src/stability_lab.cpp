#include "curvstab/stability_lab.hpp"

#include "curvstab/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace curvstab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// sigma-norm of a covariant 3-tensor stored as t[k](i, j)
double norm3(const std::array<Mat, kMaxDim>& t, const Mat& sigma_inv, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (sigma_inv(k, l) == 0.0) continue;
      s += sigma_inv(k, l) * inner2(t[k], t[l], sigma_inv);
    }
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LogRadius log_radius(const RadialField& field) {
  return [field](std::span<const double> x) { return field.eval(x); };
}

LogRadius offset_sphere(const Vec& a) {
  if (!(a.norm() < 1.0)) throw DomainError("offset_sphere: the origin must lie inside the sphere");
  const double k = 1.0 - a.squaredNorm();
  return [a, k](std::span<const double> x) {
    double xa = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) xa += x[i] * a[static_cast<int>(i)];
    return std::log(xa + std::sqrt(xa * xa + k));
  };
}

DeficitNodes deficit_nodes(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  if (field.n != grid.n) throw DomainError("deficits: dimension mismatch");
  const std::size_t count = grid.size();
  DeficitNodes nodes;
  nodes.ric0.resize(count);
  nodes.weyl.resize(count);
  nodes.scalar.resize(count);
  nodes.density.resize(count);
  nodes.shapes.resize(count);
  map_nodes(
      count,
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const GeometryJet geom = assemble(eval_jet(field, pt, 2), pt, true);
        nodes.ric0[i] = norm2(geom.ric0, geom.g_inv);
        nodes.weyl[i] = norm4(geom.weyl, geom.g_inv);
        nodes.scalar[i] = geom.scalar;
        nodes.density[i] = geom.vol_density;
        nodes.shapes[i] = node_shape(geom);
      },
      exec);
  return nodes;
}

DeficitReport summarize_deficits(const DeficitNodes& nodes, const QuadratureGrid& grid, double p,
                                 Execution exec) {
  DeficitReport rep;
  rep.n = grid.n;
  rep.p = p;
  const Admissibility adm = admissibility(nodes.shapes, grid, exec);
  rep.a_inf_norm = adm.a_inf_norm;
  rep.convexity_ok = adm.convexity_ok;
  rep.min_eigenvalue = adm.min_eigenvalue;
  rep.volume = adm.volume;
  rep.diameter_estimate = adm.diameter_estimate;

  const std::span<const double> dens(nodes.density);
  std::vector<double> weighted(nodes.scalar.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = nodes.scalar[i] * nodes.density[i];
  rep.r_avg = integrate(weighted, grid, exec) / rep.volume;
  std::vector<double> dev(nodes.scalar.size());
  for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = nodes.scalar[i] - rep.r_avg;

  rep.ric0_lp = lp_norm(nodes.ric0, p, grid, dens, exec);
  rep.weyl_lp = lp_norm(nodes.weyl, p, grid, dens, exec);
  rep.r_minus_avg_lp = lp_norm(dev, p, grid, dens, exec);
  return rep;
}

DeficitReport deficits(const RadialField& field, const QuadratureGrid& grid, double p, Execution exec) {
  return summarize_deficits(deficit_nodes(field, grid, exec), grid, p, exec);
}

RayTrace ray_trace_recenter(const LogRadius& f, const Vec& c, std::span<const double> z) {
  const int d = static_cast<int>(z.size());
  if (c.size() != d) throw DomainError("ray_trace_recenter: centre has the wrong dimension");
  Vec zv(d);
  for (int a = 0; a < d; ++a) zv[a] = z[a];
  const double zc = zv.dot(c);
  const double c2 = c.squaredNorm();

  auto ray_length = [&](const Vec& x) {
    const double rho = std::exp(f(as_span(x)));
    const double disc = zc * zc + rho * rho - c2;
    if (!(disc >= 0.0)) throw NumericError("ray_trace_recenter: ray misses the surface");
    return -zc + std::sqrt(disc);
  };

  RayTrace out;
  Vec x = zv;
  bool settled = false;
  for (int it = 1; it <= 200; ++it) {
    const Vec y = ray_length(x) * zv + c;
    const Vec next = y / y.norm();
    const double step = (next - x).norm();
    x = next;
    out.iterations = it;
    if (settled) break;
    if (step < 1e-12) settled = true;  // one more sweep after the step drops below tolerance
  }
  if (!settled) throw NumericError("ray_trace_recenter: no convergence in 200 iterations");
  out.x_c = x;
  const double t = ray_length(x);
  if (!(t > 0.0)) throw NumericError("ray_trace_recenter: centre outside the surface");
  out.f_c = std::log(t);
  return out;
}

Vec phi_map(const LogRadius& f, const Vec& c, const QuadratureGrid& grid, Execution exec) {
  std::vector<double> fc(grid.size());
  map_nodes(grid.size(), [&](std::size_t i) { fc[i] = ray_trace_recenter(f, c, grid.ambient(i)).f_c; },
            exec);
  return -first_moment(fc, grid, exec);
}

CenterSolve solve_center(const LogRadius& f, const QuadratureGrid& grid, Execution exec) {
  const int d = grid.n + 1;
  std::vector<double> rho(grid.size());
  map_nodes(grid.size(), [&](std::size_t i) { rho[i] = std::exp(f(grid.ambient(i))); }, exec);
  const double radius = 0.3 * *std::min_element(rho.begin(), rho.end());
  auto clamp = [radius](Vec c) {
    const double nc = c.norm();
    if (nc > radius) c *= radius / nc;
    return c;
  };

  CenterSolve out;
  Vec c = Vec::Zero(d);
  Vec phi = phi_map(f, c, grid, exec);
  out.trace.push_back(phi.norm());
  constexpr double kJacobianStep = 1e-6;
  for (int it = 0; it < 50; ++it) {
    if (phi.norm() < kPhiTolerance) break;
    out.iterations = it + 1;

    Mat jac(d, d);
    for (int a = 0; a < d; ++a) {
      Vec cp = c;
      cp[a] += kJacobianStep;
      jac.col(a) = (phi_map(f, cp, grid, exec) - phi) / kJacobianStep;
    }
    Eigen::FullPivLU<Mat> lu(jac);
    Vec step = Vec::Zero(d);
    bool newton_ok = lu.isInvertible() && lu.rcond() > 1e-12;
    if (newton_ok) {
      step = lu.solve(-phi);
      newton_ok = step.allFinite();
    }
    Vec trial_c = c;
    Vec trial_phi = phi;
    bool improved = false;
    if (newton_ok) {
      trial_c = clamp(c + step);
      trial_phi = phi_map(f, trial_c, grid, exec);
      improved = trial_phi.norm() < phi.norm();
    }
    if (!improved) {
      // damped fixed point c <- c - t Phi(c)
      for (double t = 1.0; t > 1e-3 && !improved; t *= 0.5) {
        trial_c = clamp(c - t * phi);
        trial_phi = phi_map(f, trial_c, grid, exec);
        improved = trial_phi.norm() < phi.norm();
      }
      ++out.fallback_steps;
    }
    if (!improved) throw NumericError("solve_center: no step reduces |Phi|");
    c = trial_c;
    phi = trial_phi;
    out.trace.push_back(phi.norm());
  }
  out.c0 = c;
  out.phi_residual = phi.norm();
  if (!(out.phi_residual < kPhiTolerance)) {
    throw NumericError("solve_center: |Phi| = " + format_double(out.phi_residual) + " after 50 steps");
  }
  return out;
}

CenterSolve solve_center(const RadialField& field, const QuadratureGrid& grid, Execution exec) {
  if (field.n != grid.n) throw DomainError("solve_center: dimension mismatch");
  return solve_center(log_radius(field), grid, exec);
}

SphereJet recentered_jet(const LogRadius& f, const Vec& c, std::span<const double> angles, double h) {
  const int n = static_cast<int>(angles.size());
  std::array<double, kMaxDim> a{};
  std::copy(angles.begin(), angles.end(), a.begin());
  const std::span<const double> as(a.data(), static_cast<std::size_t>(n));
  auto value = [&]() { return ray_trace_recenter(f, c, as_span(embed(as))).f_c; };

  const ChartPoint pt = build_chart_point(angles, 2);
  SphereJet jet;
  jet.order = 2;
  jet.value = value();
  Vec d1(n);
  Mat d2(n, n);
  std::array<double, kMaxDim> plus{}, minus{};
  for (int i = 0; i < n; ++i) {
    a[i] = angles[i] + h;
    plus[i] = value();
    a[i] = angles[i] - h;
    minus[i] = value();
    a[i] = angles[i];
    d1[i] = (plus[i] - minus[i]) / (2.0 * h);
    d2(i, i) = (plus[i] - 2.0 * jet.value + minus[i]) / (h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int si = -1; si <= 1; si += 2)
        for (int sj = -1; sj <= 1; sj += 2) {
          a[i] = angles[i] + si * h;
          a[j] = angles[j] + sj * h;
          s += si * sj * value();
        }
      a[i] = angles[i];
      a[j] = angles[j];
      d2(i, j) = d2(j, i) = s / (4.0 * h * h);
    }
  jet.grad = d1;
  jet.hess = d2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) jet.hess(i, j) -= pt.sigma_christoffel(k, i, j) * d1[k];
  return jet;
}

ClosenessNodes closeness_nodes(const LogRadius& f, const Vec& c0, const QuadratureGrid& grid, double h,
                               Execution exec) {
  if (!(h > 0.0)) throw DomainError("closeness_norms: finite-difference step must be positive");
  if (h + kChartSingularityGuard >= grid.min_pole_distance()) {
    throw DomainError("closeness_norms: finite-difference step reaches past the outermost grid nodes");
  }
  const int n = grid.n;
  const int d = n + 1;
  const std::size_t count = grid.size();
  ClosenessNodes nodes;
  nodes.f_c0.resize(count);
  nodes.psi.resize(count);
  nodes.pullback.resize(count);
  nodes.f_c0_values.resize(count);
  map_nodes(
      count,
      [&](std::size_t i) {
        const ChartPoint pt = grid.chart_point(i, 2);
        const SphereJet jet = recentered_jet(f, c0, grid.angles(i), h);
        nodes.f_c0_values[i] = jet.value;
        nodes.f_c0[i] = magnitudes(jet, pt.sigma_inv);

        const double ef = std::exp(jet.value);
        const double u = ef - 1.0;
        const Mat ddf = jet.grad * jet.grad.transpose();
        for (int a = 0; a < d; ++a) {
          const Vec dx = pt.jacobian.row(a).transpose();
          const double xa = pt.ambient[a];
          SphereJet comp;
          comp.order = 2;
          comp.value = u * xa;
          comp.grad = ef * xa * jet.grad + u * dx;
          comp.hess = ef * xa * (jet.hess + ddf) + ef * (jet.grad * dx.transpose() + dx * jet.grad.transpose()) -
                      u * xa * pt.sigma;
          nodes.psi[i][a] = magnitudes(comp, pt.sigma_inv);
        }

        const double e2f = ef * ef;
        const Mat gpart = pt.sigma + ddf;
        const Mat hmat = e2f * gpart - pt.sigma;
        std::array<Mat, kMaxDim> dh;
        for (int k = 0; k < n; ++k)
          dh[k] = 2.0 * jet.grad[k] * e2f * gpart +
                  e2f * (jet.hess.col(k) * jet.grad.transpose() + jet.grad * jet.hess.row(k));
        JetMagnitudes pb;
        pb.order = 1;
        pb.value = norm2(hmat, pt.sigma_inv);
        pb.grad = norm3(dh, pt.sigma_inv, n);
        nodes.pullback[i] = pb;
      },
      exec);
  return nodes;
}

Closeness summarize_closeness(const ClosenessNodes& nodes, const QuadratureGrid& grid, double p,
                              Execution exec) {
  Closeness out;
  out.f_c0_w2p = sobolev_norm(nodes.f_c0, 2, p, grid, exec);
  const int d = grid.n + 1;
  double sum = 0.0;
  std::vector<JetMagnitudes> comp(nodes.psi.size());
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = nodes.psi[i][a];
    const double v = sobolev_norm(comp, 2, p, grid, exec);
    sum += v * v;
  }
  out.psi_minus_id_w2p = std::sqrt(sum);
  out.pullback_w1p = sobolev_norm(nodes.pullback, 1, p, grid, exec);
  return out;
}

Closeness closeness_norms(const LogRadius& f, const Vec& c0, const QuadratureGrid& grid, double p,
                          Execution exec) {
  return summarize_closeness(closeness_nodes(f, c0, grid, kClosenessStep, exec), grid, p, exec);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, Execution exec) {
  if (config.p.empty()) throw ConfigError("sweep: no p values");
  if (config.families.empty()) throw ConfigError("sweep: no families");
  const QuadratureGrid grid =
      build_grid(config.n, config.resolution.empty() ? default_resolution(config.n) : config.resolution);
  const int n = config.n;

  std::vector<SweepRecord> records;
  int case_id = 0;
  for (const auto& family : config.families) {
    const Polynomial base(n + 1, family.terms);
    for (double eps : family.eps) {
      SweepRecord proto;
      proto.n = n;
      proto.eps = eps;
      proto.family = family.name;

      std::string status = "ok";
      DeficitNodes dnodes;
      ClosenessNodes cnodes;
      bool have_closeness = false;
      try {
        const RadialField field = normalize_volume(RadialField(n, base.scaled(eps)), grid, exec);
        dnodes = deficit_nodes(field, grid, exec);
        const CenterSolve center = solve_center(field, grid, exec);
        proto.c0 = center.c0;
        proto.c0_norm = center.c0.norm();
        proto.phi_residual = center.phi_residual;
        proto.newton_iters = center.iterations;
        cnodes = closeness_nodes(log_radius(field), center.c0, grid, kClosenessStep, exec);
        proto.vf_residual = first_moment(cnodes.f_c0_values, grid, exec).norm();
        have_closeness = true;
      } catch (const NumericError&) {
        status = "solver_error";
      }

      for (double p : config.p) {
        SweepRecord rec = proto;
        rec.case_id = case_id++;
        rec.p = p;
        if (!dnodes.density.empty()) {
          rec.deficit = summarize_deficits(dnodes, grid, p, exec);
        } else {
          rec.deficit.n = n;
          rec.deficit.p = p;
          for (double* v : {&rec.deficit.ric0_lp, &rec.deficit.weyl_lp, &rec.deficit.r_minus_avg_lp,
                            &rec.deficit.r_avg, &rec.deficit.a_inf_norm, &rec.deficit.volume,
                            &rec.deficit.diameter_estimate})
            *v = kNaN;
          rec.deficit.convexity_ok = false;
        }
        if (have_closeness) {
          const Closeness cl = summarize_closeness(cnodes, grid, p, exec);
          rec.f_c0_w2p = cl.f_c0_w2p;
          rec.psi_minus_id_w2p = cl.psi_minus_id_w2p;
          rec.pullback_w1p = cl.pullback_w1p;
          rec.ratio_main = rec.f_c0_w2p / rec.deficit.ric0_lp;
          rec.ratio_cor = rec.pullback_w1p / rec.deficit.ric0_lp;
        } else {
          for (double* v : {&rec.c0_norm, &rec.phi_residual, &rec.vf_residual, &rec.f_c0_w2p,
                            &rec.psi_minus_id_w2p, &rec.pullback_w1p, &rec.ratio_main, &rec.ratio_cor})
            *v = kNaN;
        }
        rec.status = status;
        if (status == "ok" && !rec.deficit.convexity_ok) rec.status = "nonconvex";
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

const std::string& csv_header() {
  static const std::string header =
      "case_id,n,p,eps,family,ric0_lp,weyl_lp,r_minus_avg_lp,r_avg,a_inf_norm,volume,diameter_est,"
      "convex,c0_norm,phi_residual,f_c0_w2p,psi_minus_id_w2p,pullback_w1p,ratio_main,ratio_cor,"
      "newton_iters,status";
  return header;
}

std::string csv_row(const SweepRecord& r) {
  std::string family = r.family;
  if (family.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : family) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    family = quoted + "\"";
  }
  const DeficitReport& d = r.deficit;
  std::string s = std::to_string(r.case_id) + ',' + std::to_string(r.n) + ',' + format_double(r.p) + ',' +
                  format_double(r.eps) + ',' + family;
  for (double v : {d.ric0_lp, d.weyl_lp, d.r_minus_avg_lp, d.r_avg, d.a_inf_norm, d.volume,
                   d.diameter_estimate})
    s += ',' + format_double(v);
  s += d.convexity_ok ? ",true" : ",false";
  for (double v : {r.c0_norm, r.phi_residual, r.f_c0_w2p, r.psi_minus_id_w2p, r.pullback_w1p, r.ratio_main,
                   r.ratio_cor})
    s += ',' + format_double(v);
  s += ',' + std::to_string(r.newton_iters) + ',' + r.status;
  return s;
}

void write_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

}  // namespace curvstab
