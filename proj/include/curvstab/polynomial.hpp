#pragma once

#include "curvstab/dense.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace curvstab {

using Exponents = std::array<int, kMaxAmbient>;

struct Term {
  double coeff = 0.0;
  Exponents exponents{};
};

/// Value and ambient derivatives of a polynomial at a point, up to third order.
struct AmbientJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
  Array3 third;
  int order = 0;
};

/// Real polynomial in `vars` ambient variables, stored as merged monomial terms.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(int vars) : vars_(vars) {}
  Polynomial(int vars, std::vector<Term> terms);

  static Polynomial constant(int vars, double c);
  /// sum_a v_a x_a
  static Polynomial linear(std::span<const double> v);

  int vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const { return degree_; }
  bool empty() const { return terms_.empty(); }

  double eval(std::span<const double> x) const;
  AmbientJet derivatives(std::span<const double> x, int order) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial scaled(double s) const;

  /// x -> P(M x) for a (vars x vars) matrix M.
  Polynomial compose_linear(const Mat& m) const;

  /// Exact integral over S^{vars-1} using closed-form monomial moments.
  double sphere_integral() const;

  /// Ambient Laplacian (exact).
  Polynomial laplacian() const;

private:
  void rebuild(std::map<Exponents, double> merged);

  int vars_ = 0;
  int degree_ = 0;
  std::vector<Term> terms_;
};

/// Polynomial with exact integer coefficients, used to build and certify harmonic polynomials.
class IntPolynomial {
public:
  IntPolynomial() = default;
  explicit IntPolynomial(int vars) : vars_(vars) {}

  static IntPolynomial monomial(int vars, const Exponents& e, std::int64_t coeff = 1);
  /// |x|^2
  static IntPolynomial radius_squared(int vars);

  int vars() const { return vars_; }
  const std::map<Exponents, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  IntPolynomial operator+(const IntPolynomial& other) const;
  IntPolynomial operator*(const IntPolynomial& other) const;
  IntPolynomial scaled(std::int64_t s) const;
  IntPolynomial laplacian() const;

  Polynomial to_real(double scale = 1.0) const;

private:
  void add(const Exponents& e, std::int64_t c);

  int vars_ = 0;
  std::map<Exponents, std::int64_t> terms_;
};

}  // namespace curvstab
