#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rproc {

using Index = std::ptrdiff_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BetaField = Eigen::VectorXd;
using IndexSet = std::vector<Index>;

// Symmetric matrix with nonnegative entries. The diagonal holds self-loop
// weights and may be positive.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(Matrix entries);

  static WeightMatrix zero(Index n) { return WeightMatrix(Matrix::Zero(n, n)); }

  Index size() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  // W_i = sum over j != i of W_ij.
  double off_diagonal_sum(Index i) const;
  Vector diagonal() const { return entries_.diagonal(); }
  WeightMatrix without_diagonal() const;
  WeightMatrix submatrix(std::span<const Index> rows) const;

 private:
  Matrix entries_;
};

// Sorted complement of `subset` in {0, ..., n-1}. Throws on duplicates or
// out-of-range entries.
IndexSet complement(Index n, std::span<const Index> subset);
IndexSet sorted_unique(std::span<const Index> subset, Index n);
Vector restrict_vector(const Vector& v, std::span<const Index> idx);
Matrix restrict_matrix(const Matrix& m, std::span<const Index> rows,
                       std::span<const Index> cols);

}  // namespace rproc
