#pragma once

#include "core/weights.hpp"

namespace rproc {

// Reversible Markov jump process parametrized by its conductances C and
// reversible measure pi. Rates are q_ij = C_ij / pi_i and the embedded chain
// jumps with p_ij = C_ij / C_i, C_i = sum_k C_ik.
class MjpParams {
 public:
  MjpParams() = default;
  MjpParams(WeightMatrix conductances, Vector pi);

  Index size() const { return c_.size(); }
  const WeightMatrix& conductances() const { return c_; }
  const Vector& pi() const { return pi_; }

  Vector total_weight() const;  // C_i
  Vector total_rate() const;    // q_i = C_i / pi_i
  Matrix rates() const;         // q_ij
  Matrix transition() const;    // p_ij

 private:
  WeightMatrix c_;
  Vector pi_;
};

}  // namespace rproc
