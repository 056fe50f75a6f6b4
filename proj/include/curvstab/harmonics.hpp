#pragma once

// Explicit harmonic polynomials on R^{n+1}. Their restrictions to S^n are eigenfunctions of the
// sphere Laplacian with eigenvalue -l(l+n-1).

#include "curvstab/polynomial.hpp"

#include <vector>

namespace curvstab {

struct HarmonicPolynomial {
  int degree = 0;
  Exponents seed{};     // monomial that was projected
  IntPolynomial exact;  // integer-scaled projection, Laplacian checked to be exactly zero
  Polynomial normalized;  // exact / its L2 average on the sphere, so that avg(Y^2) = 1
};

/// Integer multiple of the harmonic projection of the monomial x^e, homogeneous of degree |e|.
IntPolynomial harmonic_projection(int vars, const Exponents& e);

/// Basis of degree-l harmonics in n + 1 variables (projections of monomials with e_0 <= 1).
/// Throws NumericError if any member fails the exact integer Laplacian check.
std::vector<HarmonicPolynomial> harmonic_basis(int n, int degree);

/// Cached library of all basis harmonics of degree 0..6 on S^n.
const std::vector<HarmonicPolynomial>& harmonic_library(int n);

/// -l(l + n - 1)
double sphere_eigenvalue(int n, int degree);

/// Zonal harmonic of degree l around the x_0 axis, normalized to avg(Y^2) = 1.
Polynomial zonal_harmonic(int n, int degree);

/// Zonal harmonic of degree l scaled so that its maximum modulus, attained at e_0, is 1.
Polynomial zonal_harmonic_unit_peak(int n, int degree);

/// Dimension of the degree-l harmonic space on S^n.
int harmonic_dimension(int n, int degree);

}  // namespace curvstab
