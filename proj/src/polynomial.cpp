#include "curvstab/polynomial.hpp"

#include "curvstab/errors.hpp"
#include "curvstab/sphere_grid.hpp"

#include <cmath>
#include <string>

namespace curvstab {
namespace {

constexpr int kMaxDegree = 24;

// e (e - 1) ... (e - m + 1)
double falling(int e, int m) {
  double r = 1.0;
  for (int k = 0; k < m; ++k) r *= (e - k);
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericError("integer polynomial overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw NumericError("integer polynomial overflow");
  return r;
}

}  // namespace

Polynomial::Polynomial(int vars, std::vector<Term> terms) : vars_(vars) {
  if (vars < 1 || vars > kMaxAmbient) throw DomainError("polynomial variable count out of range");
  std::map<Exponents, double> merged;
  for (const auto& t : terms) {
    for (int a = vars; a < kMaxAmbient; ++a)
      if (t.exponents[a] != 0) throw DomainError("exponent on a variable beyond vars");
    for (int a = 0; a < vars; ++a)
      if (t.exponents[a] < 0) throw DomainError("negative exponent");
    merged[t.exponents] += t.coeff;
  }
  rebuild(std::move(merged));
}

void Polynomial::rebuild(std::map<Exponents, double> merged) {
  terms_.clear();
  degree_ = 0;
  for (const auto& [e, c] : merged) {
    if (c == 0.0) continue;
    terms_.push_back({c, e});
    int deg = 0;
    for (int a = 0; a < vars_; ++a) deg += e[a];
    degree_ = std::max(degree_, deg);
  }
  if (degree_ > kMaxDegree) throw DomainError("polynomial degree above " + std::to_string(kMaxDegree));
}

Polynomial Polynomial::constant(int vars, double c) {
  return Polynomial(vars, {Term{c, Exponents{}}});
}

Polynomial Polynomial::linear(std::span<const double> v) {
  const int vars = static_cast<int>(v.size());
  std::vector<Term> terms;
  for (int a = 0; a < vars; ++a) {
    Exponents e{};
    e[a] = 1;
    terms.push_back({v[a], e});
  }
  return Polynomial(vars, std::move(terms));
}

double Polynomial::eval(std::span<const double> x) const {
  std::array<std::array<double, kMaxDegree + 1>, kMaxAmbient> pw;
  for (int a = 0; a < vars_; ++a) {
    pw[a][0] = 1.0;
    for (int k = 1; k <= degree_; ++k) pw[a][k] = pw[a][k - 1] * x[a];
  }
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int a = 0; a < vars_; ++a) v *= pw[a][t.exponents[a]];
    s += v;
  }
  return s;
}

AmbientJet Polynomial::derivatives(std::span<const double> x, int order) const {
  const int d = vars_;
  std::array<std::array<double, kMaxDegree + 1>, kMaxAmbient> pw;
  for (int a = 0; a < d; ++a) {
    pw[a][0] = 1.0;
    for (int k = 1; k <= degree_; ++k) pw[a][k] = pw[a][k - 1] * x[a];
  }

  AmbientJet jet;
  jet.order = order;
  jet.grad = Vec::Zero(d);
  jet.hess = Mat::Zero(d, d);
  if (order >= 3) jet.third = Array3(d);

  // base[a][m] = falling(e_a, m) x_a^{e_a - m}, zero if m > e_a
  std::array<std::array<double, 4>, kMaxAmbient> base;
  for (const auto& t : terms_) {
    for (int a = 0; a < d; ++a) {
      const int e = t.exponents[a];
      for (int m = 0; m <= order; ++m) base[a][m] = m > e ? 0.0 : falling(e, m) * pw[a][e - m];
    }
    // value
    double v0 = t.coeff;
    for (int a = 0; a < d; ++a) v0 *= base[a][0];
    jet.value += v0;
    if (order < 1) continue;

    for (int a = 0; a < d; ++a) {
      if (t.exponents[a] == 0) continue;
      double ga = t.coeff;
      for (int c = 0; c < d; ++c) ga *= base[c][c == a ? 1 : 0];
      jet.grad[a] += ga;
      if (order < 2) continue;
      for (int b = a; b < d; ++b) {
        if (t.exponents[b] < (b == a ? 2 : 1)) continue;
        double h = t.coeff;
        for (int c = 0; c < d; ++c) {
          const int m = (c == a) + (c == b);
          h *= base[c][m];
        }
        jet.hess(a, b) += h;
        if (b != a) jet.hess(b, a) += h;
        if (order < 3) continue;
        for (int cc = b; cc < d; ++cc) {
          double w = t.coeff;
          for (int c = 0; c < d; ++c) {
            const int m = (c == a) + (c == b) + (c == cc);
            if (m > t.exponents[c]) {
              w = 0.0;
              break;
            }
            w *= base[c][m];
          }
          if (w == 0.0) continue;
          // scatter to all permutations of (a, b, cc)
          const int idx[3] = {a, b, cc};
          static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
          // distinct permutations only
          std::array<std::array<int, 3>, 6> seen{};
          int nseen = 0;
          for (const auto& p : kPerm) {
            const std::array<int, 3> q = {idx[p[0]], idx[p[1]], idx[p[2]]};
            bool dup = false;
            for (int s = 0; s < nseen; ++s) dup = dup || (seen[s] == q);
            if (dup) continue;
            seen[nseen++] = q;
            jet.third(q[0], q[1], q[2]) += w;
          }
        }
      }
    }
  }
  return jet;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.vars_ != vars_ && !other.empty() && !empty()) throw DomainError("polynomial vars mismatch");
  const int vars = std::max(vars_, other.vars_);
  std::map<Exponents, double> merged;
  for (const auto& t : terms_) merged[t.exponents] += t.coeff;
  for (const auto& t : other.terms_) merged[t.exponents] += t.coeff;
  Polynomial r(vars);
  r.rebuild(std::move(merged));
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other.scaled(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.vars_ != vars_) throw DomainError("polynomial vars mismatch");
  std::map<Exponents, double> merged;
  for (const auto& s : terms_)
    for (const auto& t : other.terms_) {
      Exponents e{};
      for (int a = 0; a < vars_; ++a) e[a] = s.exponents[a] + t.exponents[a];
      merged[e] += s.coeff * t.coeff;
    }
  Polynomial r(vars_);
  r.rebuild(std::move(merged));
  return r;
}

Polynomial Polynomial::scaled(double s) const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff *= s;
  if (s == 0.0) r.terms_.clear();
  return r;
}

Polynomial Polynomial::compose_linear(const Mat& m) const {
  const int d = vars_;
  if (m.rows() != d || m.cols() != d) throw DomainError("compose_linear: matrix shape");
  // y_a = sum_b m(a, b) x_b
  std::vector<Polynomial> lin;
  for (int a = 0; a < d; ++a) {
    std::vector<double> row(d);
    for (int b = 0; b < d; ++b) row[b] = m(a, b);
    lin.push_back(Polynomial::linear(row));
  }
  Polynomial result(d);
  for (const auto& t : terms_) {
    Polynomial prod = Polynomial::constant(d, t.coeff);
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < t.exponents[a]; ++k) prod = prod * lin[a];
    result = result + prod;
  }
  return result;
}

double Polynomial::sphere_integral() const {
  double s = 0.0;
  for (const auto& t : terms_) {
    s += t.coeff * sphere_monomial_integral({t.exponents.data(), static_cast<std::size_t>(vars_)});
  }
  return s;
}

Polynomial Polynomial::laplacian() const {
  std::map<Exponents, double> merged;
  for (const auto& t : terms_)
    for (int a = 0; a < vars_; ++a) {
      const int e = t.exponents[a];
      if (e < 2) continue;
      Exponents f = t.exponents;
      f[a] -= 2;
      merged[f] += t.coeff * e * (e - 1);
    }
  Polynomial r(vars_);
  r.rebuild(std::move(merged));
  return r;
}

IntPolynomial IntPolynomial::monomial(int vars, const Exponents& e, std::int64_t coeff) {
  IntPolynomial p(vars);
  p.add(e, coeff);
  return p;
}

IntPolynomial IntPolynomial::radius_squared(int vars) {
  IntPolynomial p(vars);
  for (int a = 0; a < vars; ++a) {
    Exponents e{};
    e[a] = 2;
    p.add(e, 1);
  }
  return p;
}

void IntPolynomial::add(const Exponents& e, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second = checked_add(it->second, c);
    if (it->second == 0) terms_.erase(it);
  }
}

IntPolynomial IntPolynomial::operator+(const IntPolynomial& other) const {
  IntPolynomial r = *this;
  for (const auto& [e, c] : other.terms_) r.add(e, c);
  return r;
}

IntPolynomial IntPolynomial::operator*(const IntPolynomial& other) const {
  IntPolynomial r(vars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : other.terms_) {
      Exponents e{};
      for (int a = 0; a < vars_; ++a) e[a] = e1[a] + e2[a];
      r.add(e, checked_mul(c1, c2));
    }
  return r;
}

IntPolynomial IntPolynomial::scaled(std::int64_t s) const {
  IntPolynomial r(vars_);
  for (const auto& [e, c] : terms_) r.add(e, checked_mul(c, s));
  return r;
}

IntPolynomial IntPolynomial::laplacian() const {
  IntPolynomial r(vars_);
  for (const auto& [e, c] : terms_)
    for (int a = 0; a < vars_; ++a) {
      if (e[a] < 2) continue;
      Exponents f = e;
      f[a] -= 2;
      r.add(f, checked_mul(c, static_cast<std::int64_t>(e[a]) * (e[a] - 1)));
    }
  return r;
}

Polynomial IntPolynomial::to_real(double scale) const {
  std::vector<Term> terms;
  for (const auto& [e, c] : terms_) terms.push_back({scale * static_cast<double>(c), e});
  return Polynomial(vars_, std::move(terms));
}

}  // namespace curvstab
