#include "core/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/mjp_params.hpp"

namespace rproc {

WeightMatrix::WeightMatrix(Matrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), "weight matrix must be square");
  const Index n = entries_.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double x = entries_(i, j);
      require(std::isfinite(x) && x >= 0.0,
              "weight matrix entries must be finite and nonnegative");
      require(x == entries_(j, i), "weight matrix must be symmetric");
    }
  }
}

double WeightMatrix::off_diagonal_sum(Index i) const {
  return entries_.row(i).sum() - entries_(i, i);
}

WeightMatrix WeightMatrix::without_diagonal() const {
  Matrix m = entries_;
  m.diagonal().setZero();
  WeightMatrix out;
  out.entries_ = std::move(m);
  return out;
}

WeightMatrix WeightMatrix::submatrix(std::span<const Index> rows) const {
  WeightMatrix out;
  out.entries_ = restrict_matrix(entries_, rows, rows);
  return out;
}

IndexSet sorted_unique(std::span<const Index> subset, Index n) {
  IndexSet out(subset.begin(), subset.end());
  std::sort(out.begin(), out.end());
  require(std::adjacent_find(out.begin(), out.end()) == out.end(),
          "vertex subset contains duplicates");
  for (Index v : out) {
    require(v >= 0 && v < n, "vertex " + std::to_string(v) + " out of range",
            ErrorCode::kOutOfRange);
  }
  return out;
}

IndexSet complement(Index n, std::span<const Index> subset) {
  const IndexSet sorted = sorted_unique(subset, n);
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n) - sorted.size());
  auto it = sorted.begin();
  for (Index v = 0; v < n; ++v) {
    if (it != sorted.end() && *it == v) {
      ++it;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

Vector restrict_vector(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out(static_cast<Index>(a)) = v(idx[a]);
  return out;
}

Matrix restrict_matrix(const Matrix& m, std::span<const Index> rows,
                       std::span<const Index> cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out(static_cast<Index>(a), static_cast<Index>(b)) = m(rows[a], cols[b]);
    }
  }
  return out;
}

MjpParams::MjpParams(WeightMatrix conductances, Vector pi)
    : c_(std::move(conductances)), pi_(std::move(pi)) {
  require(pi_.size() == c_.size(), "reversible measure has wrong dimension");
  for (Index i = 0; i < pi_.size(); ++i) {
    require(std::isfinite(pi_(i)) && pi_(i) > 0.0,
            "reversible measure must be strictly positive");
  }
}

Vector MjpParams::total_weight() const { return c_.matrix().rowwise().sum(); }

Vector MjpParams::total_rate() const {
  return total_weight().cwiseQuotient(pi_);
}

Matrix MjpParams::rates() const {
  return pi_.cwiseInverse().asDiagonal() * c_.matrix();
}

Matrix MjpParams::transition() const {
  const Vector total = total_weight();
  Matrix p = c_.matrix();
  for (Index i = 0; i < p.rows(); ++i) {
    if (total(i) > 0.0) p.row(i) /= total(i);
  }
  return p;
}

}  // namespace rproc
