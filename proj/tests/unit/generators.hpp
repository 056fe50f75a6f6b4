#pragma once

// Hand-rolled generators for the property tests. Every generator takes the engine explicitly so a
// failing case can be replayed from its seed.

#include "curvstab/dense.hpp"
#include "curvstab/identity_checks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace curvstab::gen {

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed * 0x9e3779b97f4a7c15ULL + 1); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec unit_vector(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Vec v(d);
  do {
    for (int a = 0; a < d; ++a) v[a] = g(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

// polar angles kept `margin` away from the chart poles
inline std::vector<double> chart_angles_sample(std::mt19937_64& rng, int n, double margin = 0.2) {
  std::vector<double> t(n);
  for (int a = 0; a + 1 < n; ++a) t[a] = uniform(rng, margin, std::numbers::pi - margin);
  t[n - 1] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return t;
}

inline Mat symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = uniform(rng, -scale, scale);
  return m;
}

inline Mat positive_definite(std::mt19937_64& rng, int n) {
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = uniform(rng, -1.0, 1.0);
  return b * b.transpose() + 0.5 * Mat::Identity(n, n);
}

inline Mat rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(m);
  return qr.householderQ();
}

// small band-limited field, keeps the surface comfortably star-shaped
inline RadialField small_field(std::mt19937_64& rng, int n, double amplitude = 0.1) {
  return random_harmonic_field(n, rng, 1, 4, 3, amplitude);
}

// small_field plus a guaranteed degree-1 part, so the optimal centre is not trivially 0
inline RadialField tilted_field(std::mt19937_64& rng, int n, double amplitude = 0.1) {
  const Vec u = unit_vector(rng, n + 1);
  std::vector<Term> terms;
  for (int a = 0; a <= n; ++a) {
    Exponents e{};
    e[a] = 1;
    terms.push_back({amplitude * u[a], e});
  }
  const RadialField f = small_field(rng, n, amplitude);
  return RadialField(n, f.poly + Polynomial(n + 1, terms));
}

}  // namespace curvstab::gen
