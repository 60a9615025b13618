#pragma once

// The mixing field beta ~ nu^W: density and exact sampling by sequential
// conditioning.

#include <optional>
#include <span>

#include "core/linalg.hpp"
#include "core/random.hpp"

namespace rproc {

struct NuSample {
  BetaField beta;
  WeightMatrix weight_used;
  IndexSet elimination_order;
};

// (2/pi)^{n/2} 1{H>0} e^{-<1,H 1>/2} / sqrt(det H); 0 when H is not PD.
double nu_density(const WeightMatrix& w, const BetaField& beta);
double nu_log_density(const WeightMatrix& w, const BetaField& beta);

// Eliminates vertices one at a time. At vertex i with current reduced
// weights V, h_i = 2 beta_i - V_ii has 1/h_i ~ IG(1/V_i, 1) with
// V_i = sum_{j != i} V_ij, and the remaining vertices are reduced by the
// one-vertex Schur complement V_jk += V_ji V_ik / h_i. The final vertex uses
// the mu = infinity limit (h ~ chi-square(1)).
//
// Without an explicit order the vertex with the largest current V_i goes
// first. Throws kInvalidArgument if some non-final vertex has V_i = 0.
NuSample sample_beta(const WeightMatrix& w, Rng& rng,
                     std::optional<std::span<const Index>> order = std::nullopt);

// beta_J ~ nu_J^{W^J(beta_I)} given beta on the complement I (ascending).
BetaField conditional_sample(const WeightMatrix& w, const Vector& beta_i,
                             std::span<const Index> j, Rng& rng);

}  // namespace rproc
