#pragma once

// Reversible Markov jump processes: simulation, restriction of paths and of
// parameters to a vertex subset, self-loop removal, and exact path laws.

#include <map>
#include <span>
#include <vector>

#include "core/mjp_params.hpp"
#include "core/random.hpp"

namespace rproc {

// X_0, X_1, ... and the waiting times T_n spent at X_n before the next jump.
// waits.size() is states.size() - 1 or states.size().
struct JumpPath {
  IndexSet states;
  std::vector<double> waits;

  bool operator==(const JumpPath&) const = default;
};

using PathKey = IndexSet;
using PathLaw = std::map<PathKey, double>;

// One step of the embedded chain plus an Exp(q_i) wait.
class MjpStepper {
 public:
  MjpStepper(const MjpParams& params, Index start);

  Index position() const { return position_; }
  // Advances by one jump; returns the wait spent at the previous position.
  double step(Rng& rng);

 private:
  Matrix cumulative_;  // row-wise cumulative transition probabilities
  Vector rate_;
  Index position_;
};

JumpPath simulate_mjp(const MjpParams& params, Index rho, std::size_t n_steps,
                      Rng& rng);

JumpPath remove_self_loops(const JumpPath& path);
JumpPath restrict_path(const JumpPath& path, std::span<const Index> j);

// Parameters of the restriction to J (sorted ascending; row a of the result
// is vertex j[a]). p^J = p_JJ + p_JI (Id - p_II)^{-1} p_IJ,
// C^J_ij = C_i p^J_ij, and the reversible measure is pi restricted to J.
MjpParams restricted_params(const MjpParams& params, std::span<const Index> j);
Matrix restricted_transition(const MjpParams& params, std::span<const Index> j);

// Self-loops removed: C^{!=} is C with zero diagonal, pi unchanged.
MjpParams drop_loop_params(const MjpParams& params);

// Law of (X_0, ..., X_k) of the embedded chain started at rho, by
// enumeration. Guarded to k <= 12 and at most 8 states.
PathLaw exact_path_law(const MjpParams& params, Index rho, unsigned k);

struct TruncatedLaw {
  PathLaw law;
  double missing_mass = 0.0;  // upper bound on mass not accounted for
};

// Law of the first k+1 states of the chain restricted to J with self-loops
// removed. For each a in J the original chain is pushed forward from a until
// it enters J away from a; the unfinished mass left after `tail_tolerance` or
// `max_steps` is reported, summed over the k steps, as missing_mass.
// States are original vertex ids.
TruncatedLaw restricted_loop_free_law(const MjpParams& params, Index rho,
                                      std::span<const Index> j, unsigned k,
                                      double tail_tolerance,
                                      std::size_t max_steps = 100000);

}  // namespace rproc
