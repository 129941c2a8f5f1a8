#pragma once

// Reference implementations used only by tests. They deliberately share no
// code path with the library routines they check.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Bit `i` (0-based) of input index x.
inline bool bit(std::size_t x, int i) { return ((x >> i) & 1U) != 0; }

inline int popcount(std::size_t x) {
  int c = 0;
  for (; x; x >>= 1) c += static_cast<int>(x & 1U);
  return c;
}

struct IntThreshold {
  std::vector<int> weights;
  double bias;
};

/// Searches integer weights in [-k, k] and half-integer biases for a unit
/// with sum_j w_j f_j(x) + bias > 0 exactly on the positive points. Complete
/// for up to 4 features with k >= 3 (every threshold function on <= 4
/// variables has an integer realization with |w| <= 3).
inline std::optional<IntThreshold> brute_force_threshold(
    const std::vector<std::vector<int>>& features, const std::vector<bool>& labels, int k) {
  const std::size_t m = features.size();
  const std::size_t points = labels.size();
  std::vector<int> w(m, -k);
  for (;;) {
    for (int b2 = -2 * (static_cast<int>(m) * k + 1) - 1; b2 <= 2 * (static_cast<int>(m) * k + 1) + 1;
         b2 += 2) {
      const double bias = b2 / 2.0;
      bool ok = true;
      for (std::size_t x = 0; ok && x < points; ++x) {
        double v = bias;
        for (std::size_t j = 0; j < m; ++j) v += w[j] * features[j][x];
        ok = (v > 0) == labels[x];
      }
      if (ok) return IntThreshold{w, bias};
    }
    std::size_t j = 0;
    while (j < m && w[j] == k) w[j++] = -k;
    if (j == m) return std::nullopt;
    ++w[j];
  }
}

/// Straight-line forward pass of a dense fixed-point net.
/// activation: 0 = step (v >= 0), 1 = clip to [0, 2^(b-1) - 1], 2 = identity.
inline std::vector<std::int64_t> forward_trace(
    const std::vector<std::vector<std::vector<std::int64_t>>>& weights,
    const std::vector<std::vector<std::int64_t>>& biases, int activation, int bit_width,
    int input_bits, std::uint32_t input) {
  std::vector<std::int64_t> layer_in;
  for (int i = 0; i < input_bits; ++i) layer_in.push_back(bit(input, i) ? 1 : 0);
  std::vector<std::int64_t> trace;
  const std::int64_t top = (std::int64_t{1} << (bit_width - 1)) - 1;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::vector<std::int64_t> out;
    for (std::size_t n = 0; n < weights[l].size(); ++n) {
      std::int64_t v = biases[l][n];
      for (std::size_t i = 0; i < layer_in.size(); ++i) v += weights[l][n][i] * layer_in[i];
      if (activation == 0) v = v >= 0 ? 1 : 0;
      if (activation == 1) v = v < 0 ? 0 : (v > top ? top : v);
      out.push_back(v);
      trace.push_back(v);
    }
    layer_in = out;
  }
  return trace;
}

/// (A^T A)^-1 A^T for full column rank A.
inline Eigen::MatrixXd normal_equations_pinv(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd ata = a.transpose() * a;
  return ata.inverse() * a.transpose();
}

/// Least-squares residual SSE via complete orthogonal (QR-based)
/// decomposition of the explicit design matrix. Plain column-pivoted QR is
/// not a least-squares solver once columns repeat.
inline double qr_residual_sse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd coef = x.completeOrthogonalDecomposition().solve(y);
  return (y - x * coef).squaredNorm();
}

/// Rank by full-pivot LU (independent of the SVD route).
inline int lu_rank(const Eigen::MatrixXd& a, double threshold = 1e-9) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(threshold);
  return static_cast<int>(lu.rank());
}

}  // namespace oracle
