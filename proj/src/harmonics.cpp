#include "curvstab/harmonics.hpp"

#include "curvstab/errors.hpp"
#include "curvstab/sphere_grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace curvstab {
namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All exponent vectors of total degree `degree` in `vars` variables, with e_0 <= max_first.
void enumerate(int vars, int degree, int max_first, std::vector<Exponents>& out) {
  Exponents e{};
  auto rec = [&](auto&& self, int var, int left) -> void {
    if (var == vars - 1) {
      e[var] = left;
      if (var != 0 || left <= max_first) out.push_back(e);
      return;
    }
    const int cap = var == 0 ? std::min(left, max_first) : left;
    for (int k = 0; k <= cap; ++k) {
      e[var] = k;
      self(self, var + 1, left - k);
    }
    e[var] = 0;
  };
  rec(rec, 0, degree);
}

HarmonicPolynomial make_member(int n, const Exponents& seed, int degree) {
  HarmonicPolynomial h;
  h.degree = degree;
  h.seed = seed;
  h.exact = harmonic_projection(n + 1, seed);
  if (!h.exact.laplacian().is_zero()) {
    throw NumericError("harmonic projection failed the exact Laplacian check (degree " +
                       std::to_string(degree) + ")");
  }
  const Polynomial real = h.exact.to_real();
  const double mean_square = (real * real).sphere_integral() / sphere_volume(n);
  h.normalized = real.scaled(1.0 / std::sqrt(mean_square));
  return h;
}

}  // namespace

IntPolynomial harmonic_projection(int vars, const Exponents& e) {
  int degree = 0;
  for (int a = 0; a < vars; ++a) degree += e[a];
  const int jmax = degree / 2;
  // h = sum_j a_j |x|^{2j} lap^j P with a_j = -a_{j-1} / (2j (2l + d - 2 - 2j)).
  // Scaled to integers: b_j = (-1)^j prod_{i=j+1}^{jmax} 2i (2l + d - 2 - 2i).
  std::vector<std::int64_t> b(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    std::int64_t v = (j % 2 == 0) ? 1 : -1;
    for (int i = j + 1; i <= jmax; ++i) v *= 2 * i * (2 * degree + vars - 2 - 2 * i);
    b[j] = v;
  }
  IntPolynomial lap_power = IntPolynomial::monomial(vars, e);
  IntPolynomial radius_power = IntPolynomial::monomial(vars, Exponents{});
  const IntPolynomial r2 = IntPolynomial::radius_squared(vars);
  IntPolynomial h(vars);
  for (int j = 0; j <= jmax; ++j) {
    h = h + (radius_power * lap_power).scaled(b[j]);
    lap_power = lap_power.laplacian();
    radius_power = radius_power * r2;
  }
  return h;
}

std::vector<HarmonicPolynomial> harmonic_basis(int n, int degree) {
  std::vector<Exponents> seeds;
  enumerate(n + 1, degree, 1, seeds);
  std::vector<HarmonicPolynomial> basis;
  basis.reserve(seeds.size());
  for (const auto& s : seeds) basis.push_back(make_member(n, s, degree));
  return basis;
}

const std::vector<HarmonicPolynomial>& harmonic_library(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<HarmonicPolynomial>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<HarmonicPolynomial> lib;
  for (int l = 0; l <= 6; ++l) {
    auto part = harmonic_basis(n, l);
    lib.insert(lib.end(), part.begin(), part.end());
  }
  return cache.emplace(n, std::move(lib)).first->second;
}

double sphere_eigenvalue(int n, int degree) { return -static_cast<double>(degree) * (degree + n - 1); }

Polynomial zonal_harmonic(int n, int degree) {
  Exponents e{};
  e[0] = degree;
  return make_member(n, e, degree).normalized;
}

int harmonic_dimension(int n, int degree) {
  const int d = n + 1;
  return static_cast<int>(binomial(degree + d - 1, d - 1) - binomial(degree + d - 3, d - 1));
}

Polynomial zonal_harmonic_unit_peak(int n, int degree) {
  const Polynomial y = zonal_harmonic(n, degree);
  std::vector<double> pole(n + 1, 0.0);
  pole[0] = 1.0;
  return y.scaled(1.0 / y.eval(pole));
}

}  // namespace curvstab
