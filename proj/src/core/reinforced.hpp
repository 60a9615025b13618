#pragma once

// Vertex-reinforced jump process (VRJP) and edge-reinforced random walk
// (ERRW): direct simulation and their mixture representations.

#include <span>
#include <vector>

#include "core/beta_sampler.hpp"
#include "core/graph.hpp"
#include "core/jump_process.hpp"

namespace rproc {

// Local times L_j = 1 + time spent at j, and the clock t = sum_j (L_j - 1).
struct LocalTimes {
  Vector local;
  double clock = 0.0;

  explicit LocalTimes(Index n) : local(Vector::Ones(n)) {}
};

// VRJP in its original time scale. While at i the jump rate to j is
// W_ij L_j, and L_j does not move during the sojourn, so every sojourn is
// an exact competing-exponentials draw.
class VrjpStepper {
 public:
  // W must have zero diagonal.
  VrjpStepper(const WeightMatrix& w, Index start);

  Index position() const { return position_; }
  const LocalTimes& local_times() const { return times_; }
  double step(Rng& rng);

 private:
  Matrix w_;
  LocalTimes times_;
  Index position_;
  Vector rates_;
};

JumpPath simulate_vrjp_direct(const WeightMatrix& w, Index rho,
                              std::size_t n_steps, Rng& rng);

// Maps original-scale waits to the exchangeable scale D(t) = sum_i (L_i^2 - 1):
// a sojourn of length s at i with local time L becomes (L + s)^2 - L^2.
// The state sequence is unchanged.
JumpPath time_change(const JumpPath& path, Index num_vertices);

// The conditional Markov jump process given beta ~ nu^W: conductances
// W_ij e^{u_i + u_j}, reversible measure 2 e^{2 u_i}, pinned at rho.
MjpParams vrjp_environment(const WeightMatrix& w, const BetaField& beta,
                           Index rho);

// Draws beta ~ nu^W, then runs the Markov jump process of vrjp_environment.
// Waits are in the exchangeable time scale.
JumpPath simulate_vrjp_mixture(const WeightMatrix& w, Index rho,
                               std::size_t n_steps, Rng& rng);

// Inserts self-loops at i at rate W_ii / 2 during every sojourn at i
// (uniform positions, total time preserved).
JumpPath decorate_self_loops(const JumpPath& path, const Vector& loop_weights,
                             Rng& rng);

// ERRW on `g` whose edge weights are the initial weights a_e.
class ErrwStepper {
 public:
  ErrwStepper(const Graph& g, Index start);

  Index position() const { return position_; }
  void step(Rng& rng);

 private:
  const Graph* graph_;
  std::vector<std::vector<std::pair<Index, Index>>> incident_;  // (neighbor, edge)
  std::vector<double> weight_;
  Index position_;
};

IndexSet simulate_errw(const Graph& g, Index rho, std::size_t n_steps, Rng& rng);

// Draws W_e ~ Gamma(a_e, 1) independently and returns the weight matrix.
WeightMatrix gamma_weights(const Graph& g, Rng& rng);

// Discrete-time VRJP with Gamma(a_e, 1) weights.
IndexSet errw_as_mixture(const Graph& g, Index rho, std::size_t n_steps,
                         Rng& rng);

// Runs `stepper` until the path restricted to J with self-loops removed has
// k + 1 entries, and returns those entries. Throws after `max_steps`.
template <class Stepper, class Step>
IndexSet restricted_loop_free_prefix(Stepper& stepper, Step&& step,
                                     const std::vector<bool>& in_j, unsigned k,
                                     std::size_t max_steps = 10'000'000);

}  // namespace rproc

#include "core/reinforced_inl.hpp"
