#include "curvstab/sphere_grid.hpp"

#include "curvstab/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace curvstab {
namespace {

enum class Factor { one, sine, cosine };

// Factor of ambient coordinate a that depends on angle k.
Factor factor_of(int n, int a, int k) {
  if (a == n) return Factor::sine;
  if (k < a) return Factor::sine;
  if (k == a) return Factor::cosine;
  return Factor::one;
}

double factor_derivative(Factor f, int order, double s, double c) {
  switch (f) {
    case Factor::one:
      return order == 0 ? 1.0 : 0.0;
    case Factor::sine: {
      static constexpr int kSign[4] = {1, 1, -1, -1};
      return kSign[order % 4] * ((order % 2 == 0) ? s : c);
    }
    case Factor::cosine: {
      static constexpr int kSign[4] = {1, -1, -1, 1};
      return kSign[order % 4] * ((order % 2 == 0) ? c : s);
    }
  }
  return 0.0;
}

struct Trig {
  std::array<double, kMaxDim> s{};
  std::array<double, kMaxDim> c{};
};

// d^{|m|} x_a / prod dt_k^{m_k}
double embed_derivative(int n, int a, const std::array<int, kMaxDim>& m, const Trig& t) {
  double v = 1.0;
  for (int k = 0; k < n; ++k) {
    const double d = factor_derivative(factor_of(n, a, k), m[k], t.s[k], t.c[k]);
    if (d == 0.0) return 0.0;
    v *= d;
  }
  return v;
}

void check_angles(std::span<const double> angles) {
  const int n = static_cast<int>(angles.size());
  if (n < 1 || n > kMaxDim) {
    throw DomainError("chart dimension " + std::to_string(n) + " outside [1, " +
                      std::to_string(kMaxDim) + "]");
  }
  for (int k = 0; k + 1 < n; ++k) {
    const double t = angles[k];
    if (!std::isfinite(t) || t <= kChartSingularityGuard ||
        t >= std::numbers::pi - kChartSingularityGuard) {
      throw DomainError("polar angle " + std::to_string(k) + " = " + std::to_string(t) +
                        " at or beyond a chart singularity");
    }
  }
  if (!std::isfinite(angles[n - 1])) throw DomainError("periodic angle is not finite");
}

}  // namespace

Vec embed(std::span<const double> angles) {
  const int n = static_cast<int>(angles.size());
  Vec x(n + 1);
  double prefix = 1.0;
  for (int a = 0; a < n; ++a) {
    x[a] = prefix * std::cos(angles[a]);
    prefix *= std::sin(angles[a]);
  }
  x[n] = prefix;
  return x;
}

Vec chart_angles(std::span<const double> x) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < 1) throw DomainError("chart_angles: needs at least two coordinates");
  Vec t(n);
  double tail2 = 0.0;
  for (int a = 1; a <= n; ++a) tail2 += x[a] * x[a];
  for (int a = 0; a < n - 1; ++a) {
    t[a] = std::atan2(std::sqrt(tail2), x[a]);
    tail2 = std::max(0.0, tail2 - x[a + 1] * x[a + 1]);
  }
  double last = std::atan2(x[n], x[n - 1]);
  if (last < 0.0) last += 2.0 * std::numbers::pi;
  t[n - 1] = last;
  return t;
}

ChartPoint build_chart_point(std::span<const double> angles, int order) {
  check_angles(angles);
  if (order != 2 && order != 3) throw DomainError("chart order must be 2 or 3");
  const int n = static_cast<int>(angles.size());
  const int d = n + 1;

  ChartPoint pt;
  pt.n = n;
  pt.order = order;
  pt.angles = Vec(n);
  Trig trig;
  for (int k = 0; k < n; ++k) {
    pt.angles[k] = angles[k];
    trig.s[k] = std::sin(angles[k]);
    trig.c[k] = std::cos(angles[k]);
  }

  std::array<int, kMaxDim> m{};
  pt.ambient = Vec(d);
  for (int a = 0; a < d; ++a) pt.ambient[a] = embed_derivative(n, a, m, trig);

  pt.jacobian = Mat::Zero(d, n);
  for (int a = 0; a < d; ++a) {
    for (int i = 0; i < n; ++i) {
      m.fill(0);
      m[i] = 1;
      pt.jacobian(a, i) = embed_derivative(n, a, m, trig);
    }
  }

  for (int a = 0; a < d; ++a) {
    pt.d2_embed[a] = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        m.fill(0);
        ++m[i];
        ++m[j];
        const double v = embed_derivative(n, a, m, trig);
        pt.d2_embed[a](i, j) = v;
        pt.d2_embed[a](j, i) = v;
      }
    }
  }

  pt.sigma = pt.jacobian.transpose() * pt.jacobian;
  pt.sigma_inv = pt.sigma.inverse();

  // G(l, i, j) = dx/dt^l . d2x/dt^i dt^j  (Christoffel symbols of the first kind)
  Array3 first_kind(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += pt.jacobian(a, l) * pt.d2_embed[a](i, j);
        first_kind(l, i, j) = s;
      }

  pt.sigma_christoffel = Array3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += pt.sigma_inv(k, l) * first_kind(l, i, j);
        pt.sigma_christoffel(k, i, j) = s;
      }

  if (order < 3) return pt;

  for (int a = 0; a < d; ++a) {
    pt.d3_embed[a] = Array3(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          m.fill(0);
          ++m[i];
          ++m[j];
          ++m[k];
          pt.d3_embed[a](i, j, k) = embed_derivative(n, a, m, trig);
        }
  }

  // d_m sigma_ab and d_m sigma^{kl}
  std::array<Mat, kMaxDim> d_sigma_inv;
  for (int mm = 0; mm < n; ++mm) {
    Mat ds = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int x = 0; x < d; ++x)
          s += pt.d2_embed[x](mm, a) * pt.jacobian(x, b) + pt.jacobian(x, a) * pt.d2_embed[x](mm, b);
        ds(a, b) = s;
      }
    d_sigma_inv[mm] = -pt.sigma_inv * ds * pt.sigma_inv;
  }

  pt.d_sigma_christoffel = Array4(n);
  for (int mm = 0; mm < n; ++mm)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // d_m G(l, i, j)
        std::array<double, kMaxDim> dg{};
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int x = 0; x < d; ++x)
            s += pt.d2_embed[x](mm, l) * pt.d2_embed[x](i, j) +
                 pt.jacobian(x, l) * pt.d3_embed[x](mm, i, j);
          dg[l] = s;
        }
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += d_sigma_inv[mm](k, l) * first_kind(l, i, j) + pt.sigma_inv(k, l) * dg[l];
          pt.d_sigma_christoffel(mm, k, i, j) = s;
        }
      }
  return pt;
}

void gauss_gegenbauer(int count, double a, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1 || a <= -1.0) throw DomainError("gauss_gegenbauer needs count >= 1 and a > -1");
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double s = 2.0 * k + 2.0 * a;
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k * (k + 2.0 * a) / ((s + 1.0) * (s - 1.0)));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    nodes[i] = eig.eigenvalues()[i];
    weights[i] = mu0 * eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
  }
  // the rule is symmetric; enforce it so odd moments cancel exactly
  for (int i = 0; i < count / 2; ++i) {
    const int j = count - 1 - i;
    const double x = 0.5 * (nodes[j] - nodes[i]);
    const double w = 0.5 * (weights[i] + weights[j]);
    nodes[i] = -x;
    nodes[j] = x;
    weights[i] = weights[j] = w;
  }
  if (count % 2 == 1) nodes[count / 2] = 0.0;
}

std::vector<int> expand_resolution(int n, std::vector<int> resolution) {
  if (resolution.size() == 1 && n > 1) {
    const int r = resolution.front();
    resolution.assign(n - 1, r);
    resolution.push_back(2 * r);
  }
  return resolution;
}

std::vector<int> default_resolution(int n) {
  if (n == 3) return {24, 24, 48};
  if (n == 4) return {16, 16, 16, 32};
  return expand_resolution(n, {10});
}

QuadratureGrid build_grid(int n, std::vector<int> resolution) {
  if (n < 3) throw DomainError("unsupported dimension n = " + std::to_string(n) + " (need n >= 3)");
  if (n > kMaxDim) throw DomainError("unsupported dimension n = " + std::to_string(n));
  resolution = expand_resolution(n, std::move(resolution));
  if (static_cast<int>(resolution.size()) != n) {
    throw DomainError("resolution needs " + std::to_string(n) + " entries");
  }
  for (int r : resolution)
    if (r < 4) throw DomainError("resolution entries must be >= 4");

  // polar angles: Gauss rule in t = cos(theta) for the weight sin^m(theta) d(theta) = (1 - t^2)^((m-1)/2) dt,
  // exact for ambient polynomials up to the rule's degree
  std::vector<std::vector<double>> theta(n);
  std::vector<std::vector<double>> weight(n);
  for (int k = 0; k + 1 < n; ++k) {
    std::vector<double> t;
    std::vector<double> w;
    gauss_gegenbauer(resolution[k], 0.5 * (n - 2 - k), t, w);
    for (int i = resolution[k] - 1; i >= 0; --i) {
      theta[k].push_back(std::acos(t[i]));
      weight[k].push_back(w[i]);
    }
  }
  const int periodic = resolution[n - 1];
  for (int j = 0; j < periodic; ++j) {
    theta[n - 1].push_back(2.0 * std::numbers::pi * j / periodic);
    weight[n - 1].push_back(2.0 * std::numbers::pi / periodic);
  }

  QuadratureGrid grid;
  grid.n = n;
  grid.resolution = resolution;
  std::size_t total = 1;
  for (int r : resolution) total *= static_cast<std::size_t>(r);
  grid.nodes.resize(total);

  std::array<int, kMaxDim> idx{};
  for (std::size_t node = 0; node < total; ++node) {
    QuadratureNode& q = grid.nodes[node];
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      q.angles[k] = theta[k][idx[k]];
      w *= weight[k][idx[k]];
    }
    q.weight = w;
    const Vec x = embed({q.angles.data(), static_cast<std::size_t>(n)});
    for (int a = 0; a <= n; ++a) q.ambient[a] = x[a];
    // last index fastest
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[k] < resolution[k]) break;
      idx[k] = 0;
    }
  }

  std::vector<double> w(total);
  for (std::size_t i = 0; i < total; ++i) w[i] = grid.nodes[i].weight;
  grid.total_weight = pairwise_sum_serial(w);
  return grid;
}

ChartPoint QuadratureGrid::chart_point(std::size_t i, int order) const {
  return build_chart_point(angles(i), order);
}

double QuadratureGrid::min_pole_distance() const {
  double best = std::numbers::pi;
  for (const auto& node : nodes)
    for (int k = 0; k + 1 < n; ++k)
      best = std::min({best, node.angles[k], std::numbers::pi - node.angles[k]});
  return best;
}

double sphere_volume(int n) {
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double sphere_monomial_integral(std::span<const int> exponents) {
  int total = 0;
  double log_num = 0.0;
  for (int e : exponents) {
    if (e % 2 != 0) return 0.0;
    total += e;
    log_num += std::lgamma(0.5 * (e + 1));
  }
  const int d = static_cast<int>(exponents.size());
  return 2.0 * std::exp(log_num - std::lgamma(0.5 * (total + d)));
}

double integrate(std::span<const double> values, const QuadratureGrid& grid, Execution exec) {
  if (values.size() != grid.size()) {
    throw DomainError("integrate: " + std::to_string(values.size()) + " values for " +
                      std::to_string(grid.size()) + " nodes");
  }
  std::vector<double> weighted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) weighted[i] = values[i] * grid.nodes[i].weight;
  return pairwise_sum(weighted, exec);
}

double average(std::span<const double> values, const QuadratureGrid& grid, Execution exec) {
  return integrate(values, grid, exec) / grid.total_weight;
}

Vec first_moment(std::span<const double> values, const QuadratureGrid& grid, Execution exec) {
  if (values.size() != grid.size()) throw DomainError("first_moment: one value per node required");
  const int d = grid.n + 1;
  Vec v(d);
  std::vector<double> comp(values.size());
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < values.size(); ++i) comp[i] = grid.nodes[i].ambient[a] * values[i];
    v[a] = d * average(comp, grid, exec);
  }
  return v;
}

double lp_norm(std::span<const double> values, double p, const QuadratureGrid& grid,
               std::optional<std::span<const double>> density, Execution exec) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("lp_norm: p must lie in (1, inf)");
  if (density && density->size() != values.size()) throw DomainError("lp_norm: density size");
  std::vector<double> integrand(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = std::pow(std::abs(values[i]), p);
    if (density) v *= (*density)[i];
    integrand[i] = v;
  }
  return std::pow(integrate(integrand, grid, exec), 1.0 / p);
}

JetMagnitudes magnitudes(const SphereJet& jet, const Mat& sigma_inv) {
  JetMagnitudes m;
  m.order = jet.order;
  m.value = std::abs(jet.value);
  if (jet.order >= 1) m.grad = norm1(jet.grad, sigma_inv);
  if (jet.order >= 2) m.hess = norm2(jet.hess, sigma_inv);
  return m;
}

std::array<double, 3> sobolev_parts(std::span<const JetMagnitudes> jets, int k, double p,
                                    const QuadratureGrid& grid, Execution exec) {
  if (k < 0 || k > 2) throw DomainError("sobolev order must be 0, 1 or 2");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("sobolev_norm: p must lie in (1, inf)");
  for (const auto& j : jets)
    if (j.order < k) throw DomainError("sobolev_norm: jet lacks derivative order " + std::to_string(k));
  std::array<double, 3> parts{};
  std::vector<double> integrand(jets.size());
  for (int level = 0; level <= k; ++level) {
    for (std::size_t i = 0; i < jets.size(); ++i) {
      const double v = level == 0 ? jets[i].value : (level == 1 ? jets[i].grad : jets[i].hess);
      integrand[i] = std::pow(v, p);
    }
    parts[level] = integrate(integrand, grid, exec);
  }
  return parts;
}

double sobolev_norm(std::span<const JetMagnitudes> jets, int k, double p, const QuadratureGrid& grid,
                    Execution exec) {
  const auto parts = sobolev_parts(jets, k, p, grid, exec);
  return std::pow(parts[0] + parts[1] + parts[2], 1.0 / p);
}

}  // namespace curvstab
