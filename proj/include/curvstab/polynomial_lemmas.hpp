#pragma once

// The eigenvalue polynomials of a diagonal second fundamental form D(x) with g = delta:
//   p(x) = |(D - delta) wedge (D + delta)|^2
//   q(x) = |Ric(x) - (n - 1) delta|^2,   Ric(x) = H D - D^2
//   r(x) = |D - delta|^2 |D + delta|^2
// and empirical certification of their zero sets and quotient bounds.

#include "curvstab/dense.hpp"
#include "curvstab/reduction.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace curvstab {

enum class LemmaPoly { p, q, r };

std::string to_string(LemmaPoly which);
/// Accepts "p", "q", "r".
LemmaPoly lemma_poly_from_string(const std::string& name);

struct PqrValues {
  double p = 0.0;        // closed form 8 sum_{i != j} (x_i x_j - 1)^2
  double p_brute = 0.0;  // full contraction of the Kulkarni-Nomizu tensor
  double q = 0.0;
  double r = 0.0;
};

PqrValues eval_pqr(std::span<const double> x);

/// Closed forms through power sums.
double p_value(std::span<const double> x);
double q_value(std::span<const double> x);
double r_value(std::span<const double> x);
double p_brute_force(std::span<const double> x);
double lemma_value(LemmaPoly which, std::span<const double> x);

/// d p / d x_i = 32 (|x|^2 x_i - x_i^3 + x_i - H), H = sum x.
Vec grad_p(std::span<const double> x);
Vec lemma_gradient(LemmaPoly which, std::span<const double> x);
Mat lemma_hessian(LemmaPoly which, std::span<const double> x);

/// Largest relative difference |p - p_brute| / max(1, p) over `count` uniform points of B_lambda.
double max_p_discrepancy(int n, double lambda, std::size_t count, std::uint64_t seed);

struct PolishResult {
  Vec x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton (Levenberg-Marquardt) descent on one lemma polynomial.
PolishResult polish_minimum(LemmaPoly which, const Vec& start, int max_iterations = 200);

struct ZeroReport {
  LemmaPoly which = LemmaPoly::p;
  int n = 0;
  double lambda = 0.0;
  double step = 0.0;
  std::size_t grid_points = 0;  // sorted tuples scanned
  std::size_t candidates = 0;   // discrete local minima polished
  std::vector<Vec> zeros;       // one representative per cluster
  std::vector<Vec> other_minima;  // polished local minima with value >= 1e-4
  std::vector<Vec> saddles;       // flat-grid candidates whose Hessian is indefinite (e.g. the origin)
  std::size_t unresolved = 0;
  double max_zero_distance = 0.0;  // distance of the worst zero from +-(1,...,1)
  double witness_min = 0.0;  // min value on grid points at max-norm distance >= 0.1 from +-(1,...,1)
  Vec witness_argmin;
  bool pass = false;
};

inline constexpr double kZeroThreshold = 1e-4;
inline constexpr double kZeroTolerance = 1e-8;

/// Scans the box [-lambda, lambda]^n on a grid of the given step for discrete local minima,
/// polishes each with Newton and classifies polished points with value < 1e-4 as zeros.
/// Throws DomainError when lambda < 1.5 or step > 0.1.
ZeroReport certify_zeros(LemmaPoly which, int n, double lambda, double step,
                         Execution exec = default_execution());

struct QuotientRange {
  double min = 0.0;
  double max = 0.0;
  Vec argmin;
};

struct ShellReport {
  double radius = 0.0;
  std::size_t samples = 0;
  double p_over_r_min = 0.0;
  double p_over_r_max = 0.0;
  double p_over_r_residual = 0.0;  // max |p/r - 4((n-2)|y|^2 + H^2)/(n|y|^2)|
  double q_residual = 0.0;         // max |q / ((n-2)^2|y|^2 + (3n-4)H^2) - 1|
  double q_over_p_min = 0.0;
};

struct BoundsReport {
  int n = 0;
  double lambda = 0.0;
  std::size_t samples = 0;
  std::size_t excluded = 0;  // inside the exclusion radius
  std::size_t skipped = 0;   // denominator below 1e-300
  QuotientRange q_over_p;
  QuotientRange p_over_r;
  std::vector<ShellReport> shells;
  double expansion_tolerance = 1e-2;
  bool pass = false;
};

/// Limit of p/r along y as y -> 0 at +-(1,...,1).
double p_over_r_limit(std::span<const double> y);
/// Quadratic part of q at +-(1,...,1).
double q_quadratic(std::span<const double> y);

/// Halton points (randomly shifted by `seed`) in B_lambda plus shells of radius 1e-1, 1e-2, 1e-3
/// around +-(1,...,1). Pass iff both minima are positive and the expansion residuals on the
/// smallest shell are below the tolerance.
BoundsReport quotient_bounds(int n, double lambda, std::size_t samples, double exclusion_radius,
                             std::uint64_t seed, std::size_t shell_samples = 4000,
                             Execution exec = default_execution());

/// i-th point of the Halton sequence in [0, 1)^dim (bases 2, 3, 5, 7, ...).
void halton_point(std::uint64_t index, int dim, std::span<double> out);

}  // namespace curvstab
