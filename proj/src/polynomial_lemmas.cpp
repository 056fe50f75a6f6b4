#include "curvstab/polynomial_lemmas.hpp"

#include "curvstab/curvature_algebra.hpp"
#include "curvstab/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace curvstab {
namespace {

void check_dim(int n) {
  if (n < 3 || n > kMaxDim) throw DomainError("lemma polynomials need 3 <= n <= " + std::to_string(kMaxDim));
}

struct PowerSums {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
};

PowerSums power_sums(std::span<const double> x) {
  PowerSums s;
  for (double v : x) {
    const double v2 = v * v;
    s.s1 += v;
    s.s2 += v2;
    s.s3 += v2 * v;
    s.s4 += v2 * v2;
  }
  return s;
}

double value_from_sums(LemmaPoly which, const PowerSums& s, int n) {
  switch (which) {
    case LemmaPoly::p:
      return 8.0 * ((s.s2 * s.s2 - s.s4) - 2.0 * (s.s1 * s.s1 - s.s2) + n * (n - 1.0));
    case LemmaPoly::q: {
      const double m = n - 1.0;
      return s.s1 * s.s1 * s.s2 + s.s4 + n * m * m - 2.0 * s.s1 * s.s3 - 2.0 * m * s.s1 * s.s1 +
             2.0 * m * s.s2;
    }
    case LemmaPoly::r:
      return (s.s2 - 2.0 * s.s1 + n) * (s.s2 + 2.0 * s.s1 + n);
  }
  return 0.0;
}

Vec to_vec(std::span<const double> x) {
  Vec v(static_cast<int>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<int>(i)] = x[i];
  return v;
}

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double distance_to_diagonal_zeros(const Vec& x) {
  const int n = static_cast<int>(x.size());
  const Vec ones = Vec::Ones(n);
  return std::min((x - ones).norm(), (x + ones).norm());
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

std::string to_string(LemmaPoly which) {
  switch (which) {
    case LemmaPoly::p: return "p";
    case LemmaPoly::q: return "q";
    case LemmaPoly::r: return "r";
  }
  return "?";
}

LemmaPoly lemma_poly_from_string(const std::string& name) {
  if (name == "p") return LemmaPoly::p;
  if (name == "q") return LemmaPoly::q;
  if (name == "r") return LemmaPoly::r;
  throw DomainError("unknown lemma polynomial '" + name + "'");
}

double p_value(std::span<const double> x) {
  return value_from_sums(LemmaPoly::p, power_sums(x), static_cast<int>(x.size()));
}
double q_value(std::span<const double> x) {
  return value_from_sums(LemmaPoly::q, power_sums(x), static_cast<int>(x.size()));
}
double r_value(std::span<const double> x) {
  return value_from_sums(LemmaPoly::r, power_sums(x), static_cast<int>(x.size()));
}
double lemma_value(LemmaPoly which, std::span<const double> x) {
  return value_from_sums(which, power_sums(x), static_cast<int>(x.size()));
}

double p_brute_force(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  check_dim(n);
  const Mat id = Mat::Identity(n, n);
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = x[i];
  const double v = norm4(kn_product(d - id, d + id), id);
  return v * v;
}

PqrValues eval_pqr(std::span<const double> x) {
  PqrValues out;
  const PowerSums s = power_sums(x);
  const int n = static_cast<int>(x.size());
  out.p = value_from_sums(LemmaPoly::p, s, n);
  out.q = value_from_sums(LemmaPoly::q, s, n);
  out.r = value_from_sums(LemmaPoly::r, s, n);
  out.p_brute = p_brute_force(x);
  return out;
}

Vec grad_p(std::span<const double> x) { return lemma_gradient(LemmaPoly::p, x); }

Vec lemma_gradient(LemmaPoly which, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const PowerSums s = power_sums(x);
  Vec g(n);
  switch (which) {
    case LemmaPoly::p:
      for (int i = 0; i < n; ++i) g[i] = 32.0 * (s.s2 * x[i] - x[i] * x[i] * x[i] + x[i] - s.s1);
      break;
    case LemmaPoly::q: {
      // q = sum_i F_i^2, F_i = H x_i - x_i^2 - (n - 1), d_j F_i = x_i + delta_ij (H - 2 x_i)
      const double m = n - 1.0;
      double fx = 0.0;
      Vec f(n);
      for (int i = 0; i < n; ++i) {
        f[i] = s.s1 * x[i] - x[i] * x[i] - m;
        fx += f[i] * x[i];
      }
      for (int j = 0; j < n; ++j) g[j] = 2.0 * (fx + f[j] * (s.s1 - 2.0 * x[j]));
      break;
    }
    case LemmaPoly::r: {
      const double a = s.s2 - 2.0 * s.s1 + n;
      const double b = s.s2 + 2.0 * s.s1 + n;
      for (int i = 0; i < n; ++i) g[i] = 2.0 * (x[i] - 1.0) * b + 2.0 * a * (x[i] + 1.0);
      break;
    }
  }
  return g;
}

Mat lemma_hessian(LemmaPoly which, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const PowerSums s = power_sums(x);
  Mat h(n, n);
  switch (which) {
    case LemmaPoly::p:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          h(i, j) = 32.0 * (2.0 * x[i] * x[j] - 1.0 + (i == j ? s.s2 - 3.0 * x[i] * x[i] + 1.0 : 0.0));
      break;
    case LemmaPoly::q: {
      const double m = n - 1.0;
      Vec f(n);
      Mat jac(n, n);  // jac(i, j) = d_j F_i
      for (int i = 0; i < n; ++i) {
        f[i] = s.s1 * x[i] - x[i] * x[i] - m;
        for (int j = 0; j < n; ++j) jac(i, j) = x[i] + (i == j ? s.s1 - 2.0 * x[i] : 0.0);
      }
      // d_k d_j F_i = delta_ik + delta_ij - 2 delta_ij delta_ik
      h = 2.0 * jac.transpose() * jac;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) h(j, k) += 2.0 * (f[k] + f[j] - (j == k ? 2.0 * f[j] : 0.0));
      break;
    }
    case LemmaPoly::r: {
      const double a = s.s2 - 2.0 * s.s1 + n;
      const double b = s.s2 + 2.0 * s.s1 + n;
      const Vec xv = to_vec(x);
      const Vec xm = xv - Vec::Ones(n);
      const Vec xp = xv + Vec::Ones(n);
      h = 2.0 * (a + b) * Mat::Identity(n, n) + 4.0 * (xm * xp.transpose() + xp * xm.transpose());
      break;
    }
  }
  return h;
}

double max_p_discrepancy(int n, double lambda, std::size_t count, std::uint64_t seed) {
  check_dim(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-lambda, lambda);
  std::vector<Vec> points(count, Vec(n));
  for (auto& pt : points)
    for (int i = 0; i < n; ++i) pt[i] = uni(rng);
  std::vector<double> rel(count);
  map_nodes(count, [&](std::size_t k) {
    const double closed = p_value(as_span(points[k]));
    const double brute = p_brute_force(as_span(points[k]));
    rel[k] = std::abs(closed - brute) / std::max(1.0, std::abs(brute));
  });
  return count == 0 ? 0.0 : *std::max_element(rel.begin(), rel.end());
}

PolishResult polish_minimum(LemmaPoly which, const Vec& start, int max_iterations) {
  const int n = static_cast<int>(start.size());
  PolishResult res;
  res.x = start;
  double mu = 1e-6;
  // Values cancel to roundoff well before the point converges near a zero, so progress and
  // convergence are judged on the gradient.
  auto grad_floor = [](const Vec& x) {
    const double s = 1.0 + x.cwiseAbs().maxCoeff();
    return 1e-12 * s * s * s;
  };
  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it + 1;
    const auto xs = as_span(res.x);
    const double f = lemma_value(which, xs);
    const Vec g = lemma_gradient(which, xs);
    const double gn = g.norm();
    if (gn < 1e-3 * grad_floor(res.x)) {
      res.converged = true;
      break;
    }
    const Mat h = lemma_hessian(which, xs);
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      const Mat damped = h + mu * (1.0 + h.diagonal().cwiseAbs().maxCoeff()) * Mat::Identity(n, n);
      Eigen::LDLT<Mat> ldlt(damped);
      const Vec step = ldlt.solve(-g);
      if (!step.allFinite()) {
        mu *= 10.0;
        continue;
      }
      const Vec trial = res.x + step;
      const double ft = lemma_value(which, as_span(trial));
      const double gt = lemma_gradient(which, as_span(trial)).norm();
      if (ft < f || gt < gn) {
        res.x = trial;
        mu = std::max(mu / 10.0, 1e-12);
        accepted = true;
        if (step.norm() < 1e-15 * (1.0 + res.x.norm())) res.converged = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) {
      // stuck at the roundoff floor of the gradient
      res.converged = gn < grad_floor(res.x);
      break;
    }
    if (res.converged) break;
  }
  res.value = lemma_value(which, as_span(res.x));
  res.grad_norm = lemma_gradient(which, as_span(res.x)).norm();
  if (!res.converged && res.grad_norm < 1e-3 * grad_floor(res.x)) res.converged = true;
  return res;
}

ZeroReport certify_zeros(LemmaPoly which, int n, double lambda, double step, Execution exec) {
  check_dim(n);
  if (lambda < 1.5) throw DomainError("certify_zeros: lambda must be at least 1.5");
  if (!(step > 0.0) || step > 0.1) throw DomainError("certify_zeros: coarse step must be in (0, 0.1]");

  ZeroReport report;
  report.which = which;
  report.n = n;
  report.lambda = lambda;
  report.step = step;

  const int count = static_cast<int>(std::floor(2.0 * lambda / step + 1e-9)) + 1;
  std::vector<std::array<double, 5>> pw(count);
  for (int k = 0; k < count; ++k) {
    const double v = -lambda + k * step;
    pw[k] = {1.0, v, v * v, v * v * v, v * v * v * v};
  }

  // Values are permutation invariant, so only sorted index tuples are visited; neighbours are
  // evaluated in the full (unsorted) box through O(1) power-sum updates.
  struct Chunk {
    std::vector<Vec> candidates;
    std::size_t visited = 0;
    double witness = std::numeric_limits<double>::infinity();
    Vec witness_at;
  };
  std::vector<Chunk> chunks(count);
  map_nodes(
      static_cast<std::size_t>(count),
      [&](std::size_t k0) {
        Chunk& chunk = chunks[k0];
        std::array<int, kMaxDim> idx{};
        std::array<PowerSums, kMaxDim + 1> prefix{};
        idx[0] = static_cast<int>(k0);
        for (int l = 1; l < n; ++l) idx[l] = idx[0];
        auto rebuild_from = [&](int level) {
          for (int l = level; l < n; ++l) {
            const auto& q = pw[idx[l]];
            prefix[l + 1] = {prefix[l].s1 + q[1], prefix[l].s2 + q[2], prefix[l].s3 + q[3],
                             prefix[l].s4 + q[4]};
          }
        };
        rebuild_from(0);
        while (true) {
          ++chunk.visited;
          const PowerSums& s = prefix[n];
          const double f0 = value_from_sums(which, s, n);
          bool local_min = true;
          for (int i = 0; i < n && local_min; ++i) {
            if (i > 0 && idx[i] == idx[i - 1]) continue;
            const auto& cur = pw[idx[i]];
            for (int dir = -1; dir <= 1; dir += 2) {
              const int nb = idx[i] + dir;
              if (nb < 0 || nb >= count) continue;
              const auto& nxt = pw[nb];
              const PowerSums t{s.s1 - cur[1] + nxt[1], s.s2 - cur[2] + nxt[2], s.s3 - cur[3] + nxt[3],
                                s.s4 - cur[4] + nxt[4]};
              if (value_from_sums(which, t, n) < f0) {
                local_min = false;
                break;
              }
            }
          }
          const double lo = pw[idx[0]][1];
          const double hi = pw[idx[n - 1]][1];
          const double dist = std::min(std::max(std::abs(lo - 1.0), std::abs(hi - 1.0)),
                                       std::max(std::abs(lo + 1.0), std::abs(hi + 1.0)));
          if (local_min || (dist >= 0.1 - 1e-12 && f0 < chunk.witness)) {
            Vec x(n);
            for (int l = 0; l < n; ++l) x[l] = pw[idx[l]][1];
            if (local_min) chunk.candidates.push_back(x);
            if (dist >= 0.1 - 1e-12 && f0 < chunk.witness) {
              chunk.witness = f0;
              chunk.witness_at = x;
            }
          }
          // advance the non-decreasing odometer on levels 1..n-1
          int level = n - 1;
          while (level >= 1 && idx[level] == count - 1) --level;
          if (level < 1) break;
          ++idx[level];
          for (int l = level + 1; l < n; ++l) idx[l] = idx[level];
          rebuild_from(level);
        }
      },
      exec);

  std::vector<Vec> candidates;
  report.witness_min = std::numeric_limits<double>::infinity();
  for (const auto& c : chunks) {
    report.grid_points += c.visited;
    candidates.insert(candidates.end(), c.candidates.begin(), c.candidates.end());
    if (c.witness < report.witness_min) {
      report.witness_min = c.witness;
      report.witness_argmin = c.witness_at;
    }
  }
  report.candidates = candidates.size();

  std::vector<PolishResult> polished(candidates.size());
  map_nodes(candidates.size(), [&](std::size_t i) { polished[i] = polish_minimum(which, candidates[i]); },
            exec);

  auto add_cluster = [](std::vector<Vec>& list, const Vec& x) {
    for (const auto& c : list)
      if ((c - x).norm() < 1e-6) return;
    list.push_back(x);
  };
  for (const auto& res : polished) {
    if (!res.converged) {
      ++report.unresolved;
      continue;
    }
    if (res.value < kZeroThreshold) {
      add_cluster(report.zeros, res.x);
      report.max_zero_distance = std::max(report.max_zero_distance, distance_to_diagonal_zeros(res.x));
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> eig(lemma_hessian(which, as_span(res.x)), Eigen::EigenvaluesOnly);
      add_cluster(eig.eigenvalues().minCoeff() < 0.0 ? report.saddles : report.other_minima, res.x);
    }
  }
  report.pass = report.unresolved == 0 && report.max_zero_distance <= kZeroTolerance;
  return report;
}

double p_over_r_limit(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  double y2 = 0.0, h = 0.0;
  for (double v : y) {
    y2 += v * v;
    h += v;
  }
  return 4.0 * ((n - 2.0) * y2 + h * h) / (n * y2);
}

double q_quadratic(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  double y2 = 0.0, h = 0.0;
  for (double v : y) {
    y2 += v * v;
    h += v;
  }
  return (n - 2.0) * (n - 2.0) * y2 + (3.0 * n - 4.0) * h * h;
}

void halton_point(std::uint64_t index, int dim, std::span<double> out) {
  if (dim > static_cast<int>(std::size(kPrimes))) throw DomainError("halton_point: dimension too large");
  for (int d = 0; d < dim; ++d) {
    const std::uint64_t base = static_cast<std::uint64_t>(kPrimes[d]);
    double f = 1.0, r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    out[d] = r;
  }
}

BoundsReport quotient_bounds(int n, double lambda, std::size_t samples, double exclusion_radius,
                             std::uint64_t seed, std::size_t shell_samples, Execution exec) {
  check_dim(n);
  if (!(exclusion_radius > 0.0)) throw DomainError("quotient_bounds: exclusion radius must be positive");
  if (!(lambda > 1.0)) throw DomainError("quotient_bounds: lambda must exceed 1");

  BoundsReport report;
  report.n = n;
  report.lambda = lambda;
  report.samples = samples;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, kMaxDim> shift{};
  for (int d = 0; d < n; ++d) shift[d] = unit(rng);

  struct Partial {
    QuotientRange qp{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}};
    QuotientRange pr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}};
    std::size_t excluded = 0, skipped = 0;
  };
  auto absorb = [](QuotientRange& range, double v, const Vec& x) {
    if (v < range.min) {
      range.min = v;
      range.argmin = x;
    }
    range.max = std::max(range.max, v);
  };
  auto merge = [](QuotientRange& into, const QuotientRange& from) {
    if (from.min < into.min) {
      into.min = from.min;
      into.argmin = from.argmin;
    }
    into.max = std::max(into.max, from.max);
  };

  constexpr std::size_t kChunk = 4096;
  const std::size_t nchunks = (samples + kChunk - 1) / kChunk;
  std::vector<Partial> partials(nchunks);
  map_nodes(
      nchunks,
      [&](std::size_t c) {
        Partial& part = partials[c];
        std::array<double, kMaxDim> u{};
        Vec x(n);
        const std::size_t end = std::min(samples, (c + 1) * kChunk);
        for (std::size_t s = c * kChunk; s < end; ++s) {
          halton_point(s + 1, n, u);
          for (int d = 0; d < n; ++d) {
            double t = u[d] + shift[d];
            if (t >= 1.0) t -= 1.0;
            x[d] = -lambda + 2.0 * lambda * t;
          }
          if (distance_to_diagonal_zeros(x) < exclusion_radius) {
            ++part.excluded;
            continue;
          }
          const PowerSums ps = power_sums(as_span(x));
          const double p = value_from_sums(LemmaPoly::p, ps, n);
          const double q = value_from_sums(LemmaPoly::q, ps, n);
          const double r = value_from_sums(LemmaPoly::r, ps, n);
          if (std::abs(p) < 1e-300 || std::abs(r) < 1e-300) {
            ++part.skipped;
            continue;
          }
          absorb(part.qp, q / p, x);
          absorb(part.pr, p / r, x);
        }
      },
      exec);

  report.q_over_p = partials.empty() ? QuotientRange{} : partials[0].qp;
  report.p_over_r = partials.empty() ? QuotientRange{} : partials[0].pr;
  for (std::size_t c = 0; c < partials.size(); ++c) {
    if (c > 0) {
      merge(report.q_over_p, partials[c].qp);
      merge(report.p_over_r, partials[c].pr);
    }
    report.excluded += partials[c].excluded;
    report.skipped += partials[c].skipped;
  }

  // Shells around +-(1,...,1): two structured directions then Gaussian directions.
  std::vector<Vec> dirs;
  {
    Vec a = Vec::Zero(n);
    a[0] = 1.0;
    a[1] = -1.0;
    dirs.push_back(a.normalized());
    dirs.push_back(Vec::Ones(n).normalized());
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (dirs.size() < std::max<std::size_t>(shell_samples, 2)) {
      Vec d(n);
      for (int i = 0; i < n; ++i) d[i] = gauss(rng);
      if (d.norm() > 1e-8) dirs.push_back(d.normalized());
    }
  }
  for (double radius : {1e-1, 1e-2, 1e-3}) {
    ShellReport shell;
    shell.radius = radius;
    shell.p_over_r_min = std::numeric_limits<double>::infinity();
    shell.p_over_r_max = -std::numeric_limits<double>::infinity();
    shell.q_over_p_min = std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0})
      for (const auto& d : dirs) {
        const Vec y = radius * d;
        const Vec x = sign * Vec::Ones(n) + y;
        const PowerSums ps = power_sums(as_span(x));
        const double p = value_from_sums(LemmaPoly::p, ps, n);
        const double q = value_from_sums(LemmaPoly::q, ps, n);
        const double r = value_from_sums(LemmaPoly::r, ps, n);
        ++shell.samples;
        if (std::abs(p) < 1e-300 || std::abs(r) < 1e-300) {
          ++report.skipped;
          continue;
        }
        const double pr = p / r;
        shell.p_over_r_min = std::min(shell.p_over_r_min, pr);
        shell.p_over_r_max = std::max(shell.p_over_r_max, pr);
        shell.q_over_p_min = std::min(shell.q_over_p_min, q / p);
        absorb(report.q_over_p, q / p, x);
        absorb(report.p_over_r, pr, x);
        shell.p_over_r_residual = std::max(shell.p_over_r_residual, std::abs(pr - p_over_r_limit(as_span(y))));
        shell.q_residual = std::max(shell.q_residual, std::abs(q / q_quadratic(as_span(y)) - 1.0));
      }
    report.shells.push_back(shell);
  }

  const ShellReport& finest = report.shells.back();
  report.pass = report.q_over_p.min > 0.0 && report.p_over_r.min > 0.0 &&
                finest.p_over_r_residual < report.expansion_tolerance &&
                finest.q_residual < report.expansion_tolerance;
  return report;
}

}  // namespace curvstab
