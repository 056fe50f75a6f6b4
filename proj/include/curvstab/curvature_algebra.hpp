#pragma once

// Algebra of covariant 4-tensors: Kulkarni-Nomizu products, fully raised norms and the
// orthogonal Riemann decomposition.

#include "curvstab/dense.hpp"

namespace curvstab {

/// Dense n^4 tensor, index order (i, j, k, l).
using Tensor4 = Array4;

/// (A wedge B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il.
/// Throws DomainError if either input is not symmetric.
Tensor4 kn_product(const Mat& a, const Mat& b);

/// T_ijkl S_pqrs g^ip g^jq g^kr g^ls
double inner4(const Tensor4& t, const Tensor4& s, const Mat& g_inv);

/// sqrt(inner4(t, t, g_inv)). Throws DomainError on a dimension mismatch.
double norm4(const Tensor4& t, const Mat& g_inv);

/// Ric_jl = g^ik T_ijkl
Mat ricci_contraction(const Tensor4& t, const Mat& g_inv);

/// Largest violation of the algebraic Riemann symmetries (antisymmetry in each pair, pair
/// symmetry, first Bianchi identity).
double riemann_symmetry_defect(const Tensor4& t);

/// Riem - R/(2n(n-1)) g wedge g - 1/(n-2) ric0 wedge g. Throws DomainError for n < 3 or when
/// ric0 is not g-trace-free.
Tensor4 weyl_from_decomposition(const Tensor4& riem, const Mat& g, const Mat& g_inv, double scalar,
                                const Mat& ric0);

/// The three pieces of the decomposition: scalar part, traceless Ricci part, Weyl part.
struct RiemannPieces {
  Tensor4 scalar_part;
  Tensor4 ric0_part;
  Tensor4 weyl;
};

RiemannPieces decompose(const Tensor4& riem, const Mat& g, double scalar, const Mat& ric0);

/// a * t + b * s
Tensor4 combine(double a, const Tensor4& t, double b, const Tensor4& s);

}  // namespace curvstab
