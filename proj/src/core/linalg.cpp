#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace rproc {
namespace {

// Rounding can leave -1e-17 where the exact value is 0; the reduced weights
// are nonnegative in exact arithmetic.
Matrix symmetrize_nonnegative(const Matrix& m) {
  Matrix out = 0.5 * (m + m.transpose());
  return out.cwiseMax(0.0);
}

}  // namespace

Matrix h_matrix(const WeightMatrix& w, const BetaField& beta) {
  require(beta.size() == w.size(), "beta and W have different dimensions");
  Matrix h = -w.matrix();
  h.diagonal() += 2.0 * beta;
  return h;
}

std::optional<Eigen::LLT<Matrix>> factor_positive_definite(const Matrix& h) {
  if (h.rows() != h.cols()) return std::nullopt;
  if (h.rows() == 0) return Eigen::LLT<Matrix>(h);
  if (!h.allFinite()) return std::nullopt;
  const double scale = h.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector pivots = llt.matrixLLT().diagonal().cwiseAbs2();
  if (!(pivots.minCoeff() > kPivotTolerance * scale)) return std::nullopt;
  return llt;
}

bool is_positive_definite(const Matrix& h) {
  return factor_positive_definite(h).has_value();
}

WeightMatrix effective_weights(const WeightMatrix& w, const Vector& beta_i,
                               std::span<const Index> j) {
  const Index n = w.size();
  const IndexSet jj = sorted_unique(j, n);
  const IndexSet ii = complement(n, jj);
  require(beta_i.size() == static_cast<Index>(ii.size()),
          "beta_I must have one entry per vertex outside J");
  const Matrix& m = w.matrix();
  Matrix reduced = restrict_matrix(m, jj, jj);
  if (ii.empty()) return WeightMatrix(reduced);

  Matrix h_ii = -restrict_matrix(m, ii, ii);
  h_ii.diagonal() += 2.0 * beta_i;
  const auto llt = factor_positive_definite(h_ii);
  if (!llt) {
    fail(ErrorCode::kNotPositiveDefinite,
         "[H_beta]_II is not positive definite; cannot reduce to J");
  }
  const Matrix w_ij = restrict_matrix(m, ii, jj);
  reduced += w_ij.transpose() * llt->solve(w_ij);
  return WeightMatrix(symmetrize_nonnegative(reduced));
}

LoopFreeWeights drop_diagonal(const WeightMatrix& w_j, const BetaField& beta_j) {
  require(beta_j.size() == w_j.size(), "beta and W have different dimensions");
  return {w_j.without_diagonal(), beta_j - 0.5 * w_j.diagonal()};
}

WiredWeights wire_weights(const WeightMatrix& w, std::span<const Index> j,
                          Index rho) {
  const Index n = w.size();
  const IndexSet jj = sorted_unique(j, n);
  require(std::binary_search(jj.begin(), jj.end(), rho),
          "wiring point rho must belong to J");
  IndexSet vertices = complement(n, jj);
  const Index k = static_cast<Index>(vertices.size());
  Matrix out = Matrix::Zero(k + 1, k + 1);
  const Matrix& m = w.matrix();
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) out(a, b) = m(vertices[a], vertices[b]);
    double to_j = 0.0;
    for (Index v : jj) to_j += m(vertices[a], v);
    out(a, k) = to_j;
    out(k, a) = to_j;
  }
  vertices.push_back(rho);
  return {WeightMatrix(std::move(out)), std::move(vertices)};
}

Vector u_field(const WeightMatrix& w, const BetaField& beta, Index rho) {
  const Index n = w.size();
  require(beta.size() == n, "beta and W have different dimensions");
  require(rho >= 0 && rho < n, "pinning vertex out of range",
          ErrorCode::kOutOfRange);
  const IndexSet rest = complement(n, std::span<const Index>(&rho, 1));
  Vector u = Vector::Zero(n);
  if (rest.empty()) return u;

  const Matrix h = restrict_matrix(h_matrix(w, beta), rest, rest);
  const auto llt = factor_positive_definite(h);
  if (!llt) {
    fail(ErrorCode::kNotPositiveDefinite,
         "[H_beta] without the pinned vertex is not positive definite");
  }
  Vector rhs(static_cast<Index>(rest.size()));
  for (std::size_t a = 0; a < rest.size(); ++a) {
    rhs(static_cast<Index>(a)) = w(rest[a], rho);
  }
  const Vector e_u = llt->solve(rhs);
  for (std::size_t a = 0; a < rest.size(); ++a) {
    const double x = e_u(static_cast<Index>(a));
    if (!(x > 0.0) || !std::isfinite(x)) {
      fail(ErrorCode::kNumerical,
           "u-field component e^u_" + std::to_string(rest[a]) +
               " is not strictly positive");
    }
    u(rest[a]) = std::log(x);
  }
  return u;
}

MjpParams conductances(const WeightMatrix& w, const Vector& u) {
  require(u.size() == w.size(), "u and W have different dimensions");
  const Index n = w.size();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) c(i, k) = w(i, k) * std::exp(u(i) + u(k));
  }
  Vector pi = (2.0 * u).array().exp() * 2.0;
  return MjpParams(WeightMatrix(std::move(c)), std::move(pi));
}

}  // namespace rproc
