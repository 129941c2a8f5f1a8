#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace logicdepth {

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kAliasTol = 1e-9;

/// Dense real matrix with a relative rank tolerance.
class LinearOperator {
 public:
  explicit LinearOperator(Eigen::MatrixXd entries, double rank_tol = kDefaultRankTol);

  static LinearOperator identity(Eigen::Index n);
  static LinearOperator zeros(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double rank_tol() const noexcept { return rank_tol_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd entries_;
  double rank_tol_;
};

/// Moore-Penrose inverse via SVD; singular values at or below
/// rank_tol * sigma_max are treated as zero.
LinearOperator pseudoinverse(const LinearOperator& a);

/// Number of singular values > rank_tol * sigma_max.
int rank(const LinearOperator& a);

struct NullSpaceBasis {
  /// Orthonormal, ordered by descending singular value; each vector's first
  /// significant component is positive.
  std::vector<Eigen::VectorXd> basis;

  int dim() const noexcept { return static_cast<int>(basis.size()); }
};

NullSpaceBasis null_space_basis(const LinearOperator& a);

struct AliasPair {
  std::size_t first;
  std::size_t second;
};

/// First pair (i < j, scanning i then j) of distinct domain vectors with
/// ||A x_i - A x_j|| <= tol.
std::optional<AliasPair> find_alias_pair(const LinearOperator& a,
                                         std::span<const Eigen::VectorXd> domain,
                                         double tol = kAliasTol);

// Exchange formats. CSV is row-major, one matrix row per line; JSON is
// {"rows", "cols", "data"} with data row-major. Both use shortest round-trip
// decimal text.

std::string to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(std::string_view text);
nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace logicdepth
