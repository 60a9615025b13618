// Acceptance battery: one PASS/FAIL line per criterion.
//
// Exit status counts the criteria that fail without being listed in
// kKnownUnattainable, plus listed ones that unexpectedly pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "common/instances.hpp"
#include "core/beta_sampler.hpp"
#include "core/inv_gauss.hpp"
#include "core/linalg.hpp"
#include "core/renorm_flow.hpp"
#include "harness/experiments.hpp"
#include "harness/stats.hpp"
#include "rproc/rproc.h"

using namespace rproc;
using rproc::testing::max_relative_gap;
using rproc::testing::random_instance;
using rproc::testing::random_subset;

namespace {

// Criterion 9 asks for |E[X_W^{1/4}] - C_{1/4}| <= 1e-3 at W = 1e-4. The
// exact value at that W is about 0.0163 below C_{1/4}: the gap shrinks like
// W^{1/2}, so no correct evaluation meets it. See the decisions ledger.
const std::set<int> kKnownUnattainable{9};

struct Outcome {
  bool pass = true;
  std::string detail;

  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[failed] ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome schur_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng = make_stream(1001);
  double worst_inverse = 0.0;
  double worst_iterated = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 3 + static_cast<Index>(rng() % 48);
    const auto inst = random_instance(n, rng, 0.15);
    const Index rho = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const Index kj = 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 2));
    const IndexSet j = random_subset(n, kj, rho, rng);
    const IndexSet i = complement(n, j);

    const Matrix h = h_matrix(inst.w, inst.beta);
    const Matrix block = restrict_matrix(h.inverse(), j, j).inverse();
    const WeightMatrix wj = effective_weights(inst.w, restrict_vector(inst.beta, i), j);
    const Vector beta_j = restrict_vector(inst.beta, j);
    worst_inverse = std::max(worst_inverse, max_relative_gap(h_matrix(wj, beta_j), block));
    const Matrix schur = restrict_matrix(h, j, j) -
                         restrict_matrix(inst.w.matrix(), j, i) *
                             restrict_matrix(h, i, i).inverse() *
                             restrict_matrix(inst.w.matrix(), i, j);
    worst_inverse = std::max(worst_inverse, max_relative_gap(schur, block));

    // J~ inside J, both containing rho; positions of J~ within J.
    const auto kt = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(kj - 1));
    const Index rho_pos = std::lower_bound(j.begin(), j.end(), rho) - j.begin();
    const IndexSet pos_t = random_subset(kj, kt, rho_pos, rng);
    IndexSet jt;
    for (Index p : pos_t) jt.push_back(j[static_cast<std::size_t>(p)]);
    const IndexSet it = complement(n, jt);
    const WeightMatrix direct = effective_weights(inst.w, restrict_vector(inst.beta, it), jt);
    const IndexSet rest = complement(kj, pos_t);
    const WeightMatrix twice = effective_weights(wj, restrict_vector(beta_j, rest), pos_t);
    worst_iterated = std::max(worst_iterated, max_relative_gap(twice.matrix(), direct.matrix()));
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.need(worst_inverse <= 1e-10, fmt("double inverse max rel err %.2e", worst_inverse));
  o.need(worst_iterated <= 1e-10, fmt("iterated restriction max rel err %.2e", worst_iterated));
  o.need(elapsed < 5.0, fmt("%.2f s (limit 5 s)", elapsed));
  return o;
}

Outcome u_field_restriction() {
  Rng rng = make_stream(1002);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 3 + static_cast<Index>(rng() % 18);
    const auto inst = random_instance(n, rng, 0.3);
    const Vector beta = sample_beta(inst.w, rng).beta;
    const Index rho = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const Index kj = 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 2));
    const IndexSet j = random_subset(n, kj, rho, rng);
    const IndexSet i = complement(n, j);
    const Vector u = u_field(inst.w, beta, rho);
    const WeightMatrix wj = effective_weights(inst.w, restrict_vector(beta, i), j);
    const Vector beta_j = restrict_vector(beta, j);
    const Index rho_pos = std::lower_bound(j.begin(), j.end(), rho) - j.begin();
    const Vector uj = u_field(wj, beta_j, rho_pos);
    const LoopFreeWeights free = drop_diagonal(wj, beta_j);
    const Vector uf = u_field(free.weights, free.beta, rho_pos);
    for (std::size_t a = 0; a < j.size(); ++a) {
      const double ref = u(j[a]);
      const double scale = std::max(1.0, std::abs(ref));
      worst = std::max(worst, std::abs(uj(static_cast<Index>(a)) - ref) / scale);
      worst = std::max(worst, std::abs(uf(static_cast<Index>(a)) - ref) / scale);
    }
  }
  Outcome o;
  o.need(worst <= 1e-10, fmt("100 instances, max rel err %.2e", worst));
  return o;
}

Outcome markov_restriction() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng = make_stream(1003);
  double worst_tv = 0.0;
  double worst_missing = 0.0;
  std::size_t cases = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (const auto& edges : connected_edge_sets(n)) {
      const MjpParams params = random_mjp(n, edges, rng);
      for (Index rho = 0; rho < n; ++rho) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          if (!(mask & (1u << rho)) || std::popcount(mask) < 2) continue;
          IndexSet j;
          for (Index v = 0; v < n; ++v) {
            if (mask & (1u << v)) j.push_back(v);
          }
          const RestrictionLawCheck c = compare_restriction_laws(params, rho, j, 4);
          worst_tv = std::max(worst_tv, c.tv);
          worst_missing = std::max(worst_missing, c.missing_mass);
          ++cases;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.need(worst_tv < 1e-5, fmt("%.0f (graph, rho, J) cases", static_cast<double>(cases)) +
                              fmt(", max TV %.2e", worst_tv));
  o.need(worst_missing < 1e-5, fmt("max untracked tail mass %.2e", worst_missing));
  o.need(elapsed < 30.0, fmt("%.2f s (limit 30 s)", elapsed));
  return o;
}

std::string tv_line(const std::string& name, const TestVerdict& v) {
  return name + fmt2(" TV %.4f (limit %.2f)", v.statistic, v.threshold);
}

Outcome restricted_mixture() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 100000;
  const unsigned k = 5;
  Outcome o;
  struct Case {
    const char* name;
    Graph g;
    IndexSet j;
  };
  const std::vector<Case> cases{{"4-cycle J={0,1,2}", cycle4_graph(), {0, 1, 2}},
                                {"4-cycle J={0,1,3}", cycle4_graph(), {0, 1, 3}},
                                {"triangle+pendant J={0,1,3}", triangle_pendant_graph(), {0, 1, 3}},
                                {"triangle+pendant J={0,2,3}", triangle_pendant_graph(), {0, 2, 3}}};
  std::uint64_t seed = 4000;
  for (const Case& c : cases) {
    const WeightMatrix w = c.g.weight_matrix();
    const Histogram direct = restricted_vrjp_histogram(w, 0, c.j, k, n, ++seed);
    const Histogram wired =
        restricted_mixture_histogram(w, 0, c.j, k, n, ++seed, MixingForm::kWired);
    const Histogram full =
        restricted_mixture_histogram(w, 0, c.j, k, n, ++seed, MixingForm::kFull);
    const TestVerdict a = two_sample_tv(direct, wired, 0.02);
    const TestVerdict b = two_sample_tv(direct, full, 0.02);
    o.need(a.pass, tv_line(std::string(c.name) + " wired", a));
    o.need(b.pass, tv_line(std::string(c.name) + " full", b));
  }
  const double elapsed = seconds_since(t0);
  o.need(elapsed < 120.0, fmt("%.1f s (limit 120 s)", elapsed));
  return o;
}

Outcome vrjp_representation() {
  Outcome o;
  const std::size_t n = 100000;
  struct Case {
    const char* name;
    WeightMatrix w;
  };
  const std::vector<Case> cases{{"triangle", triangle_graph(1.0, 0.5, 1.5).weight_matrix()},
                                {"path-3 from an end", path3_graph(1.0, 0.7).weight_matrix()}};
  std::uint64_t seed = 5000;
  for (const Case& c : cases) {
    const Histogram d = vrjp_direct_histogram(c.w, 0, 6, n, ++seed);
    const Histogram m = vrjp_mixture_histogram(c.w, 0, 6, n, ++seed);
    const TestVerdict v = two_sample_tv(d, m, 0.02);
    o.need(v.pass, tv_line(c.name, v));
  }
  const Histogram d = vrjp_direct_histogram(path3_graph(1.0, 0.7).weight_matrix(), 1, 6, n, 5101);
  const Histogram m = vrjp_mixture_histogram(path3_graph(1.0, 0.7).weight_matrix(), 1, 6, n, 5102);
  const TestVerdict mid = two_sample_tv(d, m, 0.02);
  o.need(mid.pass, tv_line("path-3 from the middle", mid));
  return o;
}

Outcome errw_mixture() {
  Outcome o;
  std::uint64_t seed = 6000;
  for (double a : {0.5, 1.0, 2.0}) {
    const Graph g = triangle_graph(a, a, a);
    const Histogram e = errw_histogram(g, 0, 6, 100000, ++seed);
    const Histogram m = errw_mixture_histogram(g, 0, 6, 100000, ++seed);
    const TestVerdict v = two_sample_tv(e, m, 0.02);
    o.need(v.pass, tv_line(fmt("a=%.1f", a), v));
  }
  return o;
}

Outcome flow_oracle() {
  Outcome o;
  struct Case {
    const char* name;
    Graph g;
    std::size_t edges;
  };
  const std::vector<Case> cases{{"single edge", single_edge_graph(), 1},
                                {"path-3", path3_graph(), 2}};
  std::uint64_t seed = 7000;
  for (const Case& c : cases) {
    const unsigned r = 2;
    std::vector<double> level_r(c.edges << r);
    for (std::size_t k = 0; k < level_r.size(); ++k) level_r[k] = 0.5 + 0.25 * k;
    const auto a = flow_route_samples(c.g, level_r, r, 0, 10000, ++seed);
    const auto b = schur_route_samples(c.g, level_r, r, 0, 10000, ++seed);
    for (std::size_t e = 0; e < c.edges; ++e) {
      std::vector<double> xa;
      std::vector<double> xb;
      for (std::size_t s = e; s < a.size(); s += c.edges) xa.push_back(a[s]);
      for (std::size_t s = e; s < b.size(); s += c.edges) xb.push_back(b[s]);
      const TestVerdict v = ks_two_sample(xa, xb, 0.01);
      o.need(v.pass, std::string(c.name) + fmt(" edge %.0f", static_cast<double>(e)) +
                         fmt2(" KS D %.4f (crit %.4f)", v.statistic, v.threshold));
    }
  }
  return o;
}

Outcome moment_bounds() {
  Outcome o;
  const WeightDistribution dist = WeightDistribution::parse("gamma:a=1");
  const BoundsCheck check = verify_bounds(6, 0, {0.1, 0.25, 0.4, 1.0}, dist, 20000, 8001);
  double worst = -std::numeric_limits<double>::infinity();
  for (const LevelMoments& row : check.rows) {
    const BoundReport& b = row.bounds;
    worst = std::max(worst, (row.mc_moment - b.phase1) / row.mc_se);
    if (b.combined) worst = std::max(worst, (row.mc_moment - *b.combined) / row.mc_se);
    worst = std::max(worst, (row.mc_log - b.log_bound) / row.mc_log_se);
  }
  o.need(check.all_ok, fmt("%.0f (alpha, level) rows, r-l up to 6",
                            static_cast<double>(check.rows.size())) +
                           fmt(", max (MC - bound)/SE %.2f (limit 4)", worst));

  std::size_t grid = 0;
  std::size_t wrong = 0;
  for (double alpha = 0.02; alpha < 0.5; alpha += 0.02) {
    const double cut = std::exp2(-alpha) / c_alpha(alpha);
    for (double f = 0.05; f < 20.0; f *= 1.07) {
      const double e = cut * f;
      ++grid;
      if (linear_step_is_tighter(alpha, e) !=
          (one_step_linear(alpha, e) < one_step_quadratic(alpha, e))) {
        ++wrong;
      }
    }
  }
  o.need(wrong == 0, fmt("crossover predicate wrong on %.0f", static_cast<double>(wrong)) +
                         fmt(" of %.0f grid points", static_cast<double>(grid)));
  return o;
}

Outcome inverse_gaussian() {
  Outcome o;
  Rng rng = make_stream(9001);
  const double a = 1.0;
  const IgParams q = IgParams::make(a / 2.0, a * a / 2.0);
  for (double s : {0.25, 1.0, 4.0}) {
    const std::size_t n = 1000000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = std::exp((1.0 - s) * ig_sample(q, rng));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    const double target = std::exp(a * (1.0 - std::sqrt(s)));
    o.need(std::abs(mean - target) <= 4.0 * se,
           fmt("Laplace s=%.2f", s) + fmt2(": |MC - exact| %.2e, 4 SE %.2e",
                                          std::abs(mean - target), 4.0 * se));
    // Independent of the sampler: the same expectation against the density.
    const double quad = boost::math::quadrature::exp_sinh<double>().integrate(
        [&](double x) {
          if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
          const double d = ig_density(x, q);
          return d > 0.0 ? std::exp((1.0 - s) * x + std::log(d)) : 0.0;
        });
    o.need(std::abs(quad - target) <= 1e-8 * target,
           fmt2("  quadrature %.10f vs %.10f", quad, target));
  }

  const double frac = frac_moment(1e-4, 0.25);
  const double oracle = std::pow(2.0, -0.25) * boost::math::tgamma(0.25) /
                        std::sqrt(3.14159265358979323846);
  o.need(std::abs(frac - oracle) <= 1e-3,
         fmt2("frac_moment(1e-4, 1/4) = %.6f vs C_1/4 = %.6f", frac, oracle));

  const double lm = log_moment(1e-6);
  o.need(std::abs(lm - kC2) <= 1e-3, fmt("log_moment(1e-6) = %.6f", lm));

  std::size_t violations = 0;
  for (int k = 0; k < 50; ++k) {
    const double w = std::pow(10.0, -5.0 + 7.0 * k / 49.0);
    const double v = log_moment(w);
    if (v > std::min(-std::log(w), kC2) + 1e-12) ++violations;
    if (v < -std::log(w + 0.5) - 1e-12) ++violations;
    if (w <= 0.5 * std::exp(-kEulerGamma) &&
        v < kC2 + 4.0 * w * (std::log(w) + kC2 - 1.0) - 1e-12) {
      ++violations;
    }
  }
  o.need(violations == 0,
         fmt("log bounds on 50-point grid, %.0f violations", static_cast<double>(violations)));
  return o;
}

Outcome minimizers() {
  Outcome o;
  Rng rng = make_stream(10001);
  std::uniform_real_distribution<double> alpha_d(0.01, 0.49);
  std::uniform_real_distribution<double> log_d(-15.0, 5.0);
  std::size_t mismatches = 0;
  for (int k = 0; k < 500; ++k) {
    const unsigned l = static_cast<unsigned>(rng() % 6);
    const unsigned r = l + static_cast<unsigned>(rng() % 13);
    const double alpha = alpha_d(rng);
    const double moment = std::exp(log_d(rng));
    const double mean_log = log_d(rng);
    const BoundReport b = moment_bound(alpha, moment, mean_log, r, l);
    if (!b.m0 || *b.m0 != b.argmin_combined) ++mismatches;
    if (b.m1 != b.argmin_log) ++mismatches;
  }
  o.need(mismatches == 0, fmt("500 tuples, %.0f mismatches", static_cast<double>(mismatches)));
  return o;
}

std::string capi_run(const std::function<rproc_status(char**)>& call) {
  char* out = nullptr;
  const rproc_status s = call(&out);
  std::string text = out ? out : "";
  rproc_string_free(out);
  return std::string(rproc_status_name(s)) + "\n" + text;
}

Outcome reproducibility() {
  Outcome o;
  rproc_graph* g = nullptr;
  rproc_graph_parse(
      R"({"vertices":["a","b","c","d"],"edges":[["a","b",1],["b","c",0.6],["c","d",1.4],["a","d",0.8]]})",
      &g);
  const double alphas[] = {0.25, 1.0};
  const auto outputs = [&](std::uint64_t seed) {
    std::vector<std::string> all;
    rproc_beta_options bo;
    rproc_beta_options_init(&bo);
    bo.seed = seed;
    bo.samples = 50;
    all.push_back(capi_run([&](char** out) { return rproc_sample_beta(g, &bo, out); }));
    rproc_simulate_options so;
    rproc_simulate_options_init(&so);
    so.seed = seed;
    so.steps = 200;
    for (rproc_model m : {RPROC_MODEL_VRJP, RPROC_MODEL_ERRW, RPROC_MODEL_MJP}) {
      so.model = m;
      all.push_back(capi_run([&](char** out) { return rproc_simulate(g, &so, out); }));
    }
    so.model = RPROC_MODEL_VRJP;
    so.route = RPROC_VRJP_MIXTURE;
    all.push_back(capi_run([&](char** out) { return rproc_simulate(g, &so, out); }));
    all.push_back(capi_run(
        [&](char** out) { return rproc_restrict_weights(g, "a,c", "a", 20, seed, out); }));
    rproc_flow_options fo;
    rproc_flow_options_init(&fo);
    fo.r = 3;
    fo.alphas = alphas;
    fo.num_alphas = 2;
    fo.samples = 1000;
    fo.seed = seed;
    all.push_back(capi_run([&](char** out) { return rproc_flow(&fo, out); }));
    all.push_back(capi_run([&](char** out) { return rproc_verify("errw-gamma", seed, 0.05, out); }));
    return all;
  };
  const auto first = outputs(20240601);
  const auto second = outputs(20240601);
  const auto other = outputs(20240602);
  std::size_t same = 0;
  std::size_t changed = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (first[k] == second[k]) ++same;
    if (first[k] != other[k]) ++changed;
  }
  rproc_graph_free(g);
  o.need(same == first.size(), fmt("%.0f", static_cast<double>(same)) +
                                   fmt(" of %.0f outputs byte-identical on rerun",
                                       static_cast<double>(first.size())));
  o.need(changed == first.size(), fmt("%.0f outputs change with the seed",
                                      static_cast<double>(changed)));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Schur identities", schur_identities},
      {"u-field restriction", u_field_restriction},
      {"Markov restriction law", markov_restriction},
      {"restricted VRJP mixture", restricted_mixture},
      {"VRJP direct vs mixture", vrjp_representation},
      {"ERRW gamma mixture", errw_mixture},
      {"flow vs Schur oracle", flow_oracle},
      {"moment bounds", moment_bounds},
      {"inverse Gaussian identities", inverse_gaussian},
      {"minimizer formulas", minimizers},
      {"reproducibility", reproducibility},
  };
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const bool known = kKnownUnattainable.contains(id);
    if (o.pass == known) ++unexpected;
    std::printf("criterion %2d %-4s %s (%.1f s): %s%s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[k].first, seconds_since(t0), o.detail.c_str(),
                known ? " [known unattainable, see ledger]" : "");
    std::fflush(stdout);
  }
  return unexpected;
}
