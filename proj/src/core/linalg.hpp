#pragma once

// Weight matrices, the matrix H_beta = 2 diag(beta) - W and the Schur
// complement reductions built on it.

#include <optional>
#include <span>

#include <Eigen/Cholesky>

#include "core/mjp_params.hpp"
#include "core/weights.hpp"

namespace rproc {

Matrix h_matrix(const WeightMatrix& w, const BetaField& beta);

// Cholesky factor of a symmetric matrix, accepted only when every pivot
// exceeds kPivotTolerance times the largest diagonal entry.
inline constexpr double kPivotTolerance = 1e-12;
std::optional<Eigen::LLT<Matrix>> factor_positive_definite(const Matrix& h);
bool is_positive_definite(const Matrix& h);

// W_JJ + W_JI ([H_beta]_II)^{-1} W_IJ where I is the complement of J and
// beta_i lists beta on I in ascending vertex order.
WeightMatrix effective_weights(const WeightMatrix& w, const Vector& beta_i,
                               std::span<const Index> j);

struct LoopFreeWeights {
  WeightMatrix weights;
  BetaField beta;
};

// Moves the diagonal of W into beta: beta_j - W_jj / 2. H is unchanged.
LoopFreeWeights drop_diagonal(const WeightMatrix& w_j, const BetaField& beta_j);

struct WiredWeights {
  WeightMatrix weights;
  // Original vertex of each row: the vertices of I ascending, then rho.
  IndexSet vertices;
};

WiredWeights wire_weights(const WeightMatrix& w, std::span<const Index> j,
                          Index rho);

// u with u_rho = 0 and e^{u} = ([H]_{--})^{-1} W_{-rho} on the other
// vertices. Throws kNotPositiveDefinite for a non-PD block and kNumerical
// when a solved component is not strictly positive.
Vector u_field(const WeightMatrix& w, const BetaField& beta, Index rho);

// Random conductances C_ij = W_ij e^{u_i + u_j} with reversible measure
// pi_i = 2 e^{2 u_i}.
MjpParams conductances(const WeightMatrix& w, const Vector& u);

}  // namespace rproc
