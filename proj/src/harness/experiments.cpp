#include "harness/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "core/beta_sampler.hpp"
#include "core/error.hpp"
#include "core/reinforced.hpp"
#include "core/renorm_flow.hpp"

namespace rproc {

RestrictionLawCheck compare_restriction_laws(const MjpParams& params, Index rho,
                                             const IndexSet& j, unsigned k) {
  const IndexSet jj = sorted_unique(j, params.size());
  const auto pos = std::lower_bound(jj.begin(), jj.end(), rho);
  require(pos != jj.end() && *pos == rho, "start vertex must belong to J");
  const MjpParams reduced = drop_loop_params(restricted_params(params, jj));
  const PathLaw local = exact_path_law(reduced, pos - jj.begin(), k);
  PathLaw via_params;
  for (const auto& [key, p] : local) {
    PathKey mapped;
    for (Index a : key) mapped.push_back(jj[static_cast<std::size_t>(a)]);
    via_params.emplace(std::move(mapped), p);
  }
  const TruncatedLaw pushed = restricted_loop_free_law(params, rho, jj, k, 1e-15);
  RestrictionLawCheck out;
  out.tv = total_variation(via_params, pushed.law);
  out.missing_mass = pushed.missing_mass;
  out.support = via_params.size();
  return out;
}

std::vector<std::vector<std::pair<Index, Index>>> connected_edge_sets(Index n) {
  require(n >= 1 && n <= 6, "graph enumeration limited to 6 vertices",
          ErrorCode::kOutOfRange);
  std::vector<std::pair<Index, Index>> all;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) all.emplace_back(a, b);
  }
  std::vector<std::vector<std::pair<Index, Index>>> out;
  const std::uint32_t limit = std::uint32_t{1} << all.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::vector<std::pair<Index, Index>> edges;
    std::vector<Index> root(static_cast<std::size_t>(n));
    for (Index v = 0; v < n; ++v) root[static_cast<std::size_t>(v)] = v;
    const auto find = [&root](Index v) {
      while (root[static_cast<std::size_t>(v)] != v) v = root[static_cast<std::size_t>(v)];
      return v;
    };
    Index components = n;
    for (std::size_t e = 0; e < all.size(); ++e) {
      if (!(mask & (std::uint32_t{1} << e))) continue;
      edges.push_back(all[e]);
      const Index a = find(all[e].first);
      const Index b = find(all[e].second);
      if (a != b) {
        root[static_cast<std::size_t>(a)] = b;
        --components;
      }
    }
    if (components == 1) out.push_back(std::move(edges));
  }
  return out;
}

MjpParams random_mjp(Index n, const std::vector<std::pair<Index, Index>>& edges,
                     Rng& rng) {
  Matrix c = Matrix::Zero(n, n);
  for (const auto& [a, b] : edges) {
    const double w = 0.2 + 1.8 * uniform01(rng);
    c(a, b) = w;
    c(b, a) = w;
  }
  for (Index v = 0; v < n; ++v) {
    if (uniform01(rng) < 0.5) c(v, v) = uniform01(rng);
  }
  Vector pi(n);
  for (Index v = 0; v < n; ++v) pi(v) = 0.5 + 1.5 * uniform01(rng);
  return MjpParams(WeightMatrix(std::move(c)), std::move(pi));
}

Histogram vrjp_direct_histogram(const WeightMatrix& w, Index rho, unsigned k,
                                std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 1);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) {
    h.add(simulate_vrjp_direct(w, rho, k, rng).states);
  }
  return h;
}

Histogram vrjp_mixture_histogram(const WeightMatrix& w, Index rho, unsigned k,
                                 std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 2);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) {
    h.add(simulate_vrjp_mixture(w, rho, k, rng).states);
  }
  return h;
}

namespace {

std::vector<bool> membership(Index n, const IndexSet& j) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (Index v : j) in[static_cast<std::size_t>(v)] = true;
  return in;
}

}  // namespace

Histogram restricted_vrjp_histogram(const WeightMatrix& w, Index rho,
                                    const IndexSet& j, unsigned k, std::size_t n,
                                    std::uint64_t seed) {
  const std::vector<bool> in_j = membership(w.size(), sorted_unique(j, w.size()));
  Rng rng = make_stream(seed, 3);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) {
    VrjpStepper stepper(w, rho);
    h.add(restricted_loop_free_prefix(
        stepper, [&rng](VrjpStepper& st) { st.step(rng); }, in_j, k));
  }
  return h;
}

Histogram restricted_mixture_histogram(const WeightMatrix& w, Index rho,
                                       const IndexSet& j, unsigned k,
                                       std::size_t n, std::uint64_t seed,
                                       MixingForm form) {
  const IndexSet jj = sorted_unique(j, w.size());
  const IndexSet ii = complement(w.size(), jj);
  const auto pos = std::lower_bound(jj.begin(), jj.end(), rho);
  require(pos != jj.end() && *pos == rho, "start vertex must belong to J");
  const Index start = pos - jj.begin();
  const WiredWeights wired = wire_weights(w, jj, rho);
  const auto n_i = static_cast<Index>(ii.size());
  Rng rng = make_stream(seed, form == MixingForm::kWired ? 4 : 5);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) {
    Vector beta_i(n_i);
    if (n_i > 0) {
      if (form == MixingForm::kWired) {
        beta_i = sample_beta(wired.weights, rng).beta.head(n_i);
      } else {
        beta_i = restrict_vector(sample_beta(w, rng).beta, ii);
      }
    }
    const WeightMatrix wj = effective_weights(w, beta_i, jj).without_diagonal();
    VrjpStepper stepper(wj, start);
    PathKey key{rho};
    for (unsigned step = 0; step < k; ++step) {
      stepper.step(rng);
      key.push_back(jj[static_cast<std::size_t>(stepper.position())]);
    }
    h.add(key);
  }
  return h;
}

Histogram errw_histogram(const Graph& g, Index rho, unsigned k, std::size_t n,
                         std::uint64_t seed) {
  Rng rng = make_stream(seed, 6);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) h.add(simulate_errw(g, rho, k, rng));
  return h;
}

Histogram errw_mixture_histogram(const Graph& g, Index rho, unsigned k,
                                 std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 7);
  Histogram h;
  for (std::size_t s = 0; s < n; ++s) h.add(errw_as_mixture(g, rho, k, rng));
  return h;
}

std::vector<double> flow_route_samples(const Graph& base,
                                       const std::vector<double>& level_r_weights,
                                       unsigned r, unsigned l, std::size_t n,
                                       std::uint64_t seed) {
  Rng rng = make_stream(seed, 8);
  std::vector<double> out;
  const FlowState start = initial_flow_state(base, r, level_r_weights);
  for (std::size_t s = 0; s < n; ++s) {
    const FlowState end = run_flow(base, start, l, rng);
    out.insert(out.end(), end.weights.begin(), end.weights.end());
  }
  return out;
}

namespace {

// Positions, inside the ascending list of Lambda_l vertices of the level-r
// subdivision, of the two endpoints of each edge of E_l.
std::vector<std::pair<Index, Index>> level_edge_positions(const SubdividedGraph& sub,
                                                          unsigned l,
                                                          const IndexSet& level) {
  const SubdividedGraph coarse(sub.base(), l);
  std::vector<std::pair<Index, Index>> out;
  const auto locate = [&](const SubVertex& v) {
    const Index idx = sub.index_of(v);
    return static_cast<Index>(std::lower_bound(level.begin(), level.end(), idx) -
                              level.begin());
  };
  for (const SubEdge& e : coarse.edges()) {
    const auto [a, b] = coarse.endpoints(e);
    out.emplace_back(locate(a), locate(b));
  }
  return out;
}

}  // namespace

std::vector<double> schur_route_samples(const Graph& base,
                                        const std::vector<double>& level_r_weights,
                                        unsigned r, unsigned l, std::size_t n,
                                        std::uint64_t seed) {
  require(l <= r, "need l <= r");
  const SubdividedGraph sub(base, r);
  const WeightMatrix w = sub.weight_matrix(level_r_weights);
  const IndexSet level = sub.level_vertices(l);
  const IndexSet rest = complement(w.size(), level);
  const auto positions = level_edge_positions(sub, l, level);
  Rng rng = make_stream(seed, 9);
  std::vector<double> out;
  for (std::size_t s = 0; s < n; ++s) {
    const Vector beta = sample_beta(w, rng).beta;
    const WeightMatrix wl = effective_weights(w, restrict_vector(beta, rest), level);
    for (const auto& [a, b] : positions) out.push_back(wl(a, b));
  }
  return out;
}

double coupled_flow_deviation(const Graph& base,
                              const std::vector<double>& level_r_weights,
                              unsigned r, unsigned l, std::size_t n,
                              std::uint64_t seed) {
  require(l <= r, "need l <= r");
  const SubdividedGraph sub(base, r);
  const WeightMatrix w = sub.weight_matrix(level_r_weights);
  const IndexSet level = sub.level_vertices(l);
  const IndexSet rest = complement(w.size(), level);
  const Index n_base = base.num_vertices();
  Rng rng = make_stream(seed, 10);
  Rng unused = make_stream(seed, 11);
  double worst = 0.0;
  const auto compare = [&worst](double got, double want) {
    if (got == want) return;
    const double scale = std::max(std::abs(want), 1e-300);
    worst = std::max(worst, std::abs(got - want) / scale);
  };
  for (std::size_t s = 0; s < n; ++s) {
    const Vector beta = sample_beta(w, rng).beta;
    const FlowState end =
        run_flow(base, initial_flow_state(base, r, level_r_weights, beta), l, unused);
    const Matrix via_flow = flow_weight_matrix(base, end).matrix();
    const Matrix via_schur =
        effective_weights(w, restrict_vector(beta, rest), level).matrix();
    for (Index a = 0; a < via_schur.rows(); ++a) {
      for (Index b = 0; b < via_schur.cols(); ++b) compare(via_flow(a, b), via_schur(a, b));
    }
    for (std::size_t k = 0; k < end.loop_betas->size(); ++k) {
      const Index v = n_base + static_cast<Index>(k);
      compare((*end.loop_betas)[k],
              beta(level[static_cast<std::size_t>(v)]) - 0.5 * via_schur(v, v));
    }
  }
  return worst;
}

Graph single_edge_graph(double w) { return Graph({"a", "b"}, {Edge{0, 1, w}}); }

Graph path3_graph(double w1, double w2) {
  return Graph({"a", "b", "c"}, {Edge{0, 1, w1}, Edge{1, 2, w2}});
}

Graph triangle_graph(double a, double b, double c) {
  return Graph({"a", "b", "c"}, {Edge{0, 1, a}, Edge{1, 2, b}, Edge{0, 2, c}});
}

Graph cycle4_graph() {
  return Graph({"a", "b", "c", "d"},
               {Edge{0, 1, 1.0}, Edge{1, 2, 0.6}, Edge{2, 3, 1.4}, Edge{0, 3, 0.8}});
}

Graph triangle_pendant_graph() {
  return Graph({"a", "b", "c", "d"},
               {Edge{0, 1, 1.0}, Edge{1, 2, 0.7}, Edge{0, 2, 1.3}, Edge{2, 3, 0.9}});
}

}  // namespace rproc
