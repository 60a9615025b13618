#include "core/reinforced.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"

namespace rproc {

VrjpStepper::VrjpStepper(const WeightMatrix& w, Index start)
    : w_(w.matrix()), times_(w.size()), position_(start), rates_(w.size()) {
  require(start >= 0 && start < w.size(), "start vertex out of range",
          ErrorCode::kOutOfRange);
  require(w_.diagonal().isZero(0.0), "VRJP weights must have zero diagonal");
}

double VrjpStepper::step(Rng& rng) {
  const Index i = position_;
  rates_ = w_.row(i).transpose().cwiseProduct(times_.local);
  const double total = rates_.sum();
  if (!(total > 0.0)) {
    fail(ErrorCode::kInvalidArgument,
         "vertex " + std::to_string(i) + " has no outgoing weight");
  }
  const double wait = exponential(rng, total);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  Index next = -1;
  for (Index j = 0; j < rates_.size(); ++j) {
    if (rates_(j) <= 0.0) continue;
    next = j;
    acc += rates_(j);
    if (u <= acc) break;
  }
  times_.local(i) += wait;
  times_.clock += wait;
  position_ = next;
  return wait;
}

JumpPath simulate_vrjp_direct(const WeightMatrix& w, Index rho,
                              std::size_t n_steps, Rng& rng) {
  VrjpStepper stepper(w, rho);
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

JumpPath time_change(const JumpPath& path, Index num_vertices) {
  Vector local = Vector::Ones(num_vertices);
  JumpPath out;
  out.states = path.states;
  out.waits.reserve(path.waits.size());
  for (std::size_t l = 0; l < path.waits.size(); ++l) {
    const Index i = path.states[l];
    require(i >= 0 && i < num_vertices, "path visits an unknown vertex",
            ErrorCode::kOutOfRange);
    const double s = path.waits[l];
    require(s >= 0.0, "negative wait in path");
    const double before = local(i);
    local(i) += s;
    out.waits.push_back(s * (2.0 * before + s));
  }
  return out;
}

MjpParams vrjp_environment(const WeightMatrix& w, const BetaField& beta,
                           Index rho) {
  return conductances(w, u_field(w, beta, rho));
}

JumpPath simulate_vrjp_mixture(const WeightMatrix& w, Index rho,
                               std::size_t n_steps, Rng& rng) {
  const NuSample sample = sample_beta(w, rng);
  return simulate_mjp(vrjp_environment(w, sample.beta, rho), rho, n_steps, rng);
}

JumpPath decorate_self_loops(const JumpPath& path, const Vector& loop_weights,
                             Rng& rng) {
  require((loop_weights.array() >= 0.0).all(),
          "self-loop weights must be nonnegative");
  JumpPath out;
  std::vector<double> cuts;
  for (std::size_t l = 0; l < path.states.size(); ++l) {
    const Index i = path.states[l];
    require(i >= 0 && i < loop_weights.size(), "path visits an unknown vertex",
            ErrorCode::kOutOfRange);
    if (l >= path.waits.size()) {
      out.states.push_back(i);
      continue;
    }
    const double s = path.waits[l];
    const double mean = 0.5 * loop_weights(i) * s;
    const long count =
        mean > 0.0 ? std::poisson_distribution<long>(mean)(rng) : 0L;
    cuts.clear();
    for (long c = 0; c < count; ++c) cuts.push_back(uniform01(rng) * s);
    std::sort(cuts.begin(), cuts.end());
    double last = 0.0;
    for (double c : cuts) {
      out.states.push_back(i);
      out.waits.push_back(c - last);
      last = c;
    }
    out.states.push_back(i);
    out.waits.push_back(s - last);
  }
  return out;
}

ErrwStepper::ErrwStepper(const Graph& g, Index start)
    : graph_(&g),
      incident_(static_cast<std::size_t>(g.num_vertices())),
      position_(start) {
  require(start >= 0 && start < g.num_vertices(), "start vertex out of range",
          ErrorCode::kOutOfRange);
  for (Index e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
    incident_[static_cast<std::size_t>(edge.u)].emplace_back(edge.v, e);
    incident_[static_cast<std::size_t>(edge.v)].emplace_back(edge.u, e);
    weight_.push_back(edge.weight);
  }
}

void ErrwStepper::step(Rng& rng) {
  const auto& around = incident_[static_cast<std::size_t>(position_)];
  require(!around.empty(), "walk is stuck at an isolated vertex");
  double total = 0.0;
  for (const auto& [v, e] : around) total += weight_[static_cast<std::size_t>(e)];
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  auto pick = around.back();
  for (const auto& entry : around) {
    acc += weight_[static_cast<std::size_t>(entry.second)];
    if (u <= acc) {
      pick = entry;
      break;
    }
  }
  weight_[static_cast<std::size_t>(pick.second)] += 1.0;
  position_ = pick.first;
}

IndexSet simulate_errw(const Graph& g, Index rho, std::size_t n_steps, Rng& rng) {
  ErrwStepper stepper(g, rho);
  IndexSet states{rho};
  states.reserve(n_steps + 1);
  for (std::size_t n = 0; n < n_steps; ++n) {
    stepper.step(rng);
    states.push_back(stepper.position());
  }
  return states;
}

WeightMatrix gamma_weights(const Graph& g, Rng& rng) {
  Matrix w = Matrix::Zero(g.num_vertices(), g.num_vertices());
  for (const Edge& e : g.edges()) {
    const double x = gamma_variate(rng, e.weight, 1.0);
    w(e.u, e.v) = x;
    w(e.v, e.u) = x;
  }
  return WeightMatrix(std::move(w));
}

IndexSet errw_as_mixture(const Graph& g, Index rho, std::size_t n_steps,
                         Rng& rng) {
  const WeightMatrix w = gamma_weights(g, rng);
  return simulate_vrjp_mixture(w, rho, n_steps, rng).states;
}

}  // namespace rproc
