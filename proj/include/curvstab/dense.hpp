#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cassert>
#include <cstddef>

namespace curvstab {

/// Largest intrinsic dimension n supported by the fixed-capacity types.
inline constexpr int kMaxDim = 6;
/// Largest ambient dimension n + 1.
inline constexpr int kMaxAmbient = kMaxDim + 1;

/// Small dense matrix with inline storage (never allocates).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxAmbient,
                          kMaxAmbient>;
/// Small dense vector with inline storage.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAmbient, 1>;

/// Dense rank-3 array (up to ambient dimension per index), inline storage, index order (a, b, c).
class Array3 {
public:
  Array3() = default;  // uninitialized storage; assign before use
  explicit Array3(int n) : n_(n) { std::fill_n(data_.begin(), n * n * n, 0.0); }

  int dim() const { return n_; }
  double& operator()(int a, int b, int c) { return data_[(a * n_ + b) * n_ + c]; }
  double operator()(int a, int b, int c) const { return data_[(a * n_ + b) * n_ + c]; }

private:
  int n_ = 0;
  std::array<double, kMaxAmbient * kMaxAmbient * kMaxAmbient> data_;
};

/// Dense rank-4 array over intrinsic indices, inline storage.
class Array4 {
public:
  Array4() = default;  // uninitialized storage; assign before use
  explicit Array4(int n) : n_(n) { std::fill_n(data_.begin(), n * n * n * n, 0.0); }

  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[((a * n_ + b) * n_ + c) * n_ + d]; }
  double operator()(int a, int b, int c, int d) const {
    return data_[((a * n_ + b) * n_ + c) * n_ + d];
  }

private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_;
};

inline Mat zero_mat(int rows, int cols) { return Mat::Zero(rows, cols); }
inline Vec zero_vec(int n) { return Vec::Zero(n); }

/// Contraction g^{ip} g^{jq} S_ij T_pq.
inline double inner2(const Mat& s, const Mat& t, const Mat& g_inv) {
  return (g_inv * s * g_inv).cwiseProduct(t).sum();
}

/// |T|_g for a covariant 2-tensor.
inline double norm2(const Mat& t, const Mat& g_inv) {
  const double v = inner2(t, t, g_inv);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

/// |v|_g for a covector.
inline double norm1(const Vec& v, const Mat& g_inv) {
  const double s = v.dot(g_inv * v);
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

}  // namespace curvstab
