#pragma once

// The level-by-level weight recursion on 2^r subdivisions, its moment
// bounds and the recurrence threshold.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/random.hpp"

namespace rproc {

// Effective weights on Lambda_l. Index conventions, with m base edges:
//   weights         e * 2^l + j - 1        for e_{j,l} on base edge e
//   interior_loops  e * (2^l - 1) + k - 1  for v_{e, k/2^l}
// which matches the vertex and edge order of SubdividedGraph(base, l).
struct FlowState {
  unsigned level = 0;
  std::vector<double> weights;
  std::vector<double> base_loops;      // W^{(l)}_{vv} at base vertices
  std::vector<double> interior_loops;  // W^{(l)}_{vv} at subdivision vertices
  // beta_v - W^{(l)}_{vv} / 2 at the subdivision vertices. Present only when
  // the flow is driven by a full beta field.
  std::optional<std::vector<double>> loop_betas;
};

// Level-r state with zero loops. Optional beta lists beta on Lambda_r in the
// vertex order of SubdividedGraph(base, r); with it the flow is coupled to
// that field instead of drawing fresh inverse Gaussians.
FlowState initial_flow_state(const Graph& base, unsigned r,
                             std::vector<double> edge_weights,
                             const std::optional<Vector>& beta = std::nullopt);

// One step l -> l - 1. The midpoint v of e', e'' contributes
// G_v = (2 beta_v)^{-1} ~ IG((W_e' + W_e'')^{-1}, 1), and
//   W_ebar       = W_e' W_e'' G_v
//   W_vbar,vbar += W_e1^2 G_v1 + W_e2^2 G_v2
//   2 beta_vbar -= W_e1^2 G_v1 + W_e2^2 G_v2   (coupled mode)
// Throws kNumerical if a coupled beta becomes nonpositive.
FlowState flow_step(const Graph& base, const FlowState& state, Rng& rng);

FlowState run_flow(const Graph& base, FlowState state, unsigned l, Rng& rng);

// Dense W^{(l)} over SubdividedGraph(base, l), diagonal included.
WeightMatrix flow_weight_matrix(const Graph& base, const FlowState& state);

// I.i.d. edge weight law for the flow: "gamma:a=<shape>" (unit scale) or
// "const:w=<value>".
struct WeightDistribution {
  enum class Kind { kGamma, kConstant } kind = Kind::kGamma;
  double parameter = 1.0;

  static WeightDistribution parse(const std::string& text);
  std::string describe() const;
  double sample(Rng& rng) const;
  double moment(double alpha) const;  // E[W^alpha]
  double mean_log() const;            // E[log W]
};

struct BoundReport {
  double alpha = 0.0;
  unsigned r = 0;
  unsigned l = 0;
  double moment = 0.0;    // E[W^alpha] at level r
  double mean_log = 0.0;  // E[log W] at level r
  double phase1 = 0.0;    // (2^-alpha)^{r-l} E[W^alpha]; alpha in [0, 1]
  // Terms of the combined bounds for m = l..r, before the minimum. The alpha
  // terms are given as logarithms; combined = exp(min) / C_alpha.
  std::vector<double> combined_log_terms;
  std::vector<double> log_terms;
  std::optional<double> combined;  // alpha in [0, 1/2) only
  double log_bound = 0.0;
  std::optional<unsigned> m0;
  unsigned m1 = 0;
  unsigned argmin_combined = 0;  // argmin of the explicit arrays
  unsigned argmin_log = 0;
};

double phase1_bound(double alpha, double moment, unsigned r, unsigned l);
// m_0 and m_1 after clamping into {l, ..., r}.
unsigned minimizer_m0(double alpha, double moment, unsigned r, unsigned l);
unsigned minimizer_m1(double mean_log, unsigned r, unsigned l);
BoundReport moment_bound(double alpha, double moment, double mean_log,
                         unsigned r, unsigned l);

// One-step bounds from E[W^alpha] (or E[log W]) at level l.
double one_step_linear(double alpha, double moment);     // 2^-alpha E
double one_step_quadratic(double alpha, double moment);  // C_alpha E^2
double one_step_log(double mean_log);  // min{E - log 2, 2E + c_2}
// The linear one-step bound is the smaller one iff E > 2^-alpha / C_alpha.
bool linear_step_is_tighter(double alpha, double moment);

struct LevelMoments {
  unsigned level = 0;
  double alpha = 0.0;
  double mc_moment = 0.0;
  double mc_se = 0.0;
  double mc_log = 0.0;
  double mc_log_se = 0.0;
  BoundReport bounds;
  bool phase1_ok = true;
  bool combined_ok = true;
  bool log_ok = true;
};

struct BoundsCheck {
  std::vector<LevelMoments> rows;  // by alpha, then level r..l
  bool all_ok = true;
};

inline constexpr unsigned kBatches = 32;
inline constexpr double kSeMultiplier = 4.0;

// Monte Carlo E[(W^{(m)})^alpha] and E[log W^{(m)}] for every m in l..r on
// one base edge, compared with the bounds plus 4 batch-means standard errors.
BoundsCheck verify_bounds(unsigned r, unsigned l, const std::vector<double>& alphas,
                          const WeightDistribution& dist, std::size_t samples,
                          std::uint64_t seed);

struct RecurrenceCheck {
  bool holds = false;
  unsigned required_gap = 0;
};

// Hypothesis moment <= c3 2^{alpha (r - l)}, and the least r - l for which it
// holds. d is the maximal degree; it enters only through c3.
RecurrenceCheck recurrence_threshold(unsigned d, double alpha, double c3,
                                     double moment, unsigned r, unsigned l);

// Mean and batch-means standard error over kBatches equal batches.
struct BatchEstimate {
  double mean = 0.0;
  double se = 0.0;
};
BatchEstimate batch_means(const std::vector<double>& values,
                          unsigned batches = kBatches);

}  // namespace rproc
