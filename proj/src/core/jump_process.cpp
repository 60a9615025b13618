#include "core/jump_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "core/error.hpp"

namespace rproc {

MjpStepper::MjpStepper(const MjpParams& params, Index start)
    : cumulative_(params.transition()),
      rate_(params.total_rate()),
      position_(start) {
  require(start >= 0 && start < params.size(), "start vertex out of range",
          ErrorCode::kOutOfRange);
  for (Index i = 0; i < cumulative_.rows(); ++i) {
    for (Index k = 1; k < cumulative_.cols(); ++k) {
      cumulative_(i, k) += cumulative_(i, k - 1);
    }
  }
}

double MjpStepper::step(Rng& rng) {
  const Index i = position_;
  if (!(rate_(i) > 0.0)) {
    fail(ErrorCode::kInvalidArgument,
         "vertex " + std::to_string(i) + " is absorbing (C_i = 0)");
  }
  const double wait = exponential(rng, rate_(i));
  const double u = uniform01(rng) * cumulative_(i, cumulative_.cols() - 1);
  Index next = 0;
  const Index n = cumulative_.cols();
  while (next < n - 1 && cumulative_(i, next) < u) ++next;
  // Never land on a zero-probability entry because of rounding at the top.
  while (next > 0 && cumulative_(i, next) == cumulative_(i, next - 1)) --next;
  position_ = next;
  return wait;
}

JumpPath simulate_mjp(const MjpParams& params, Index rho, std::size_t n_steps,
                      Rng& rng) {
  MjpStepper stepper(params, rho);
  JumpPath path;
  path.states.reserve(n_steps + 1);
  path.waits.reserve(n_steps);
  path.states.push_back(rho);
  for (std::size_t n = 0; n < n_steps; ++n) {
    path.waits.push_back(stepper.step(rng));
    path.states.push_back(stepper.position());
  }
  return path;
}

JumpPath remove_self_loops(const JumpPath& path) {
  JumpPath out;
  if (path.states.empty()) return out;
  out.states.push_back(path.states.front());
  double acc = 0.0;
  for (std::size_t l = 0; l + 1 < path.states.size(); ++l) {
    if (l < path.waits.size()) acc += path.waits[l];
    if (path.states[l + 1] != path.states[l]) {
      out.states.push_back(path.states[l + 1]);
      out.waits.push_back(acc);
      acc = 0.0;
    }
  }
  // Waits are only kept for blocks whose end was observed.
  if (out.waits.size() + 1 > out.states.size()) out.waits.resize(out.states.size() - 1);
  return out;
}

JumpPath restrict_path(const JumpPath& path, std::span<const Index> j) {
  require(!path.states.empty(), "cannot restrict an empty path");
  std::vector<Index> members(j.begin(), j.end());
  std::sort(members.begin(), members.end());
  const auto in_j = [&](Index v) {
    return std::binary_search(members.begin(), members.end(), v);
  };
  require(in_j(path.states.front()), "restricted path must start inside J");
  JumpPath out;
  for (std::size_t l = 0; l < path.states.size(); ++l) {
    if (!in_j(path.states[l])) continue;
    out.states.push_back(path.states[l]);
    if (l < path.waits.size()) out.waits.push_back(path.waits[l]);
  }
  return out;
}

Matrix restricted_transition(const MjpParams& params, std::span<const Index> j) {
  const Index n = params.size();
  const IndexSet jj = sorted_unique(j, n);
  require(jj.size() >= 2, "restriction needs |J| >= 2");
  const IndexSet ii = complement(n, jj);
  const Matrix p = params.transition();
  Matrix pj = restrict_matrix(p, jj, jj);
  if (ii.empty()) return pj;
  const Index k = static_cast<Index>(ii.size());
  const Matrix a = Matrix::Identity(k, k) - restrict_matrix(p, ii, ii);
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    fail(ErrorCode::kNotPositiveDefinite,
         "Id - p_II is singular: the chain cannot leave I");
  }
  pj += restrict_matrix(p, jj, ii) * lu.solve(restrict_matrix(p, ii, jj));
  return pj;
}

MjpParams restricted_params(const MjpParams& params, std::span<const Index> j) {
  const IndexSet jj = sorted_unique(j, params.size());
  const Matrix pj = restricted_transition(params, jj);
  const Vector total = restrict_vector(params.total_weight(), jj);
  Matrix c = total.asDiagonal() * pj;
  // C^J is symmetric in exact arithmetic.
  c = (0.5 * (c + c.transpose())).cwiseMax(0.0).eval();
  return MjpParams(WeightMatrix(std::move(c)), restrict_vector(params.pi(), jj));
}

MjpParams drop_loop_params(const MjpParams& params) {
  const Vector total = params.total_weight();
  for (Index i = 0; i < params.size(); ++i) {
    if (total(i) > 0.0 && params.conductances()(i, i) >= total(i)) {
      fail(ErrorCode::kInvalidArgument,
           "vertex " + std::to_string(i) + " has an absorbing self-loop");
    }
  }
  return MjpParams(params.conductances().without_diagonal(), params.pi());
}

PathLaw exact_path_law(const MjpParams& params, Index rho, unsigned k) {
  require(k <= 12 && params.size() <= 8,
          "exact path law limited to k <= 12 steps and 8 states",
          ErrorCode::kOutOfRange);
  require(rho >= 0 && rho < params.size(), "start vertex out of range",
          ErrorCode::kOutOfRange);
  const Matrix p = params.transition();
  PathLaw current{{PathKey{rho}, 1.0}};
  for (unsigned step = 0; step < k; ++step) {
    PathLaw next;
    for (const auto& [path, mass] : current) {
      const Index i = path.back();
      for (Index t = 0; t < p.cols(); ++t) {
        if (p(i, t) <= 0.0) continue;
        PathKey extended = path;
        extended.push_back(t);
        next.emplace(std::move(extended), mass * p(i, t));
      }
    }
    current = std::move(next);
  }
  return current;
}

TruncatedLaw restricted_loop_free_law(const MjpParams& params, Index rho,
                                      std::span<const Index> j, unsigned k,
                                      double tail_tolerance,
                                      std::size_t max_steps) {
  const Index n = params.size();
  const IndexSet jj = sorted_unique(j, n);
  require(std::binary_search(jj.begin(), jj.end(), rho),
          "start vertex must belong to J");
  std::vector<bool> in_j(static_cast<std::size_t>(n), false);
  for (Index v : jj) in_j[static_cast<std::size_t>(v)] = true;
  const Matrix p = params.transition();

  // next(a, b): probability that the chain started at a first enters J at a
  // vertex b != a, obtained by pushing the original chain forward.
  Matrix next = Matrix::Zero(n, n);
  double worst_missing = 0.0;
  for (Index a : jj) {
    Vector mass = Vector::Zero(n);
    mass(a) = 1.0;
    double remaining = 1.0;
    for (std::size_t step = 0; step < max_steps && remaining > tail_tolerance;
         ++step) {
      Vector moved = p.transpose() * mass;
      for (Index b : jj) {
        if (b == a) continue;
        next(a, b) += moved(b);
        moved(b) = 0.0;
      }
      mass = std::move(moved);
      remaining = mass.sum();
    }
    worst_missing = std::max(worst_missing, remaining);
  }

  TruncatedLaw out;
  out.missing_mass = static_cast<double>(k) * worst_missing;
  PathLaw current{{PathKey{rho}, 1.0}};
  for (unsigned step = 0; step < k; ++step) {
    PathLaw extended;
    for (const auto& [path, mass] : current) {
      for (Index b : jj) {
        const double q = next(path.back(), b);
        if (q <= 0.0) continue;
        PathKey key = path;
        key.push_back(b);
        extended.emplace(std::move(key), mass * q);
      }
    }
    current = std::move(extended);
  }
  out.law = std::move(current);
  return out;
}

}  // namespace rproc
