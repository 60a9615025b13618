#pragma once

// Monte Carlo and exact experiments shared by the verify suites and the
// acceptance tests.

#include <cstdint>
#include <vector>

#include "core/graph.hpp"
#include "core/jump_process.hpp"
#include "harness/stats.hpp"

namespace rproc {

// Exact comparison of the two routes to the law of the first k+1 states of
// the chain restricted to J with self-loops removed.
struct RestrictionLawCheck {
  double tv = 0.0;
  double missing_mass = 0.0;
  std::size_t support = 0;
};
RestrictionLawCheck compare_restriction_laws(const MjpParams& params, Index rho,
                                             const IndexSet& j, unsigned k);

// Edge sets of all connected labeled simple graphs on n vertices, n <= 6.
std::vector<std::vector<std::pair<Index, Index>>> connected_edge_sets(Index n);

// Conductances uniform on [0.2, 2] on the given edges, a self-loop in
// [0, 1] at each vertex with probability 1/2, pi uniform on [0.5, 2].
MjpParams random_mjp(Index n, const std::vector<std::pair<Index, Index>>& edges,
                     Rng& rng);

// Discrete skeleton histograms, keyed by the first k+1 visited vertices.
Histogram vrjp_direct_histogram(const WeightMatrix& w, Index rho, unsigned k,
                                std::size_t n, std::uint64_t seed);
Histogram vrjp_mixture_histogram(const WeightMatrix& w, Index rho, unsigned k,
                                 std::size_t n, std::uint64_t seed);

// Direct VRJP on the whole vertex set, restricted to J with loops removed.
Histogram restricted_vrjp_histogram(const WeightMatrix& w, Index rho,
                                    const IndexSet& j, unsigned k, std::size_t n,
                                    std::uint64_t seed);

// Fresh VRJP on J with weights W^{J!=}(beta_I), where beta_I comes from
// nu^{W-hat} on I + {rho} (wired) or from nu^W on all vertices (full).
enum class MixingForm { kWired, kFull };
Histogram restricted_mixture_histogram(const WeightMatrix& w, Index rho,
                                       const IndexSet& j, unsigned k,
                                       std::size_t n, std::uint64_t seed,
                                       MixingForm form);

Histogram errw_histogram(const Graph& g, Index rho, unsigned k, std::size_t n,
                         std::uint64_t seed);
Histogram errw_mixture_histogram(const Graph& g, Index rho, unsigned k,
                                 std::size_t n, std::uint64_t seed);

// Samples of W^{(l)} on every edge of E_l (row-major: sample, then edge).
// Flow route: i.i.d. inverse Gaussian midpoint draws. Schur route: a full
// beta ~ nu^W on Lambda_r followed by effective_weights onto Lambda_l.
std::vector<double> flow_route_samples(const Graph& base,
                                       const std::vector<double>& level_r_weights,
                                       unsigned r, unsigned l, std::size_t n,
                                       std::uint64_t seed);
std::vector<double> schur_route_samples(const Graph& base,
                                        const std::vector<double>& level_r_weights,
                                        unsigned r, unsigned l, std::size_t n,
                                        std::uint64_t seed);

// Largest relative deviation between the coupled flow and the direct Schur
// reduction (all entries of W^{(l)} including the diagonal, plus the
// surviving loop betas) over `n` beta fields.
double coupled_flow_deviation(const Graph& base,
                              const std::vector<double>& level_r_weights,
                              unsigned r, unsigned l, std::size_t n,
                              std::uint64_t seed);

// Graphs used throughout the checks.
Graph single_edge_graph(double w = 1.0);
Graph path3_graph(double w1 = 1.0, double w2 = 1.0);
Graph triangle_graph(double a = 1.0, double b = 1.0, double c = 1.0);
Graph cycle4_graph();
Graph triangle_pendant_graph();

}  // namespace rproc
