#include "harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <json.hpp>

#include "core/beta_sampler.hpp"
#include "core/error.hpp"
#include "core/inv_gauss.hpp"
#include "core/reinforced.hpp"
#include "core/renorm_flow.hpp"
#include "harness/experiments.hpp"
#include "harness/io.hpp"

namespace rproc {

namespace {

TestVerdict verdict(std::string name, double statistic, double threshold,
                    std::uint64_t n, std::string notes = {}) {
  TestVerdict v;
  v.name = std::move(name);
  v.statistic = statistic;
  v.threshold = threshold;
  v.pass = statistic <= threshold;
  v.n = n;
  v.notes = std::move(notes);
  return v;
}

TestVerdict renamed(TestVerdict v, std::string name) {
  v.name = std::move(name) + " (" + v.name + ")";
  return v;
}

std::size_t scaled(double scale, std::size_t n) {
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::llround(scale * n)));
}

std::vector<TestVerdict> restriction_mjp(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  Rng rng = make_stream(seed, 100);
  double worst_tv = 0.0;
  double worst_missing = 0.0;
  double worst_balance = 0.0;
  double worst_rows = 0.0;
  std::uint64_t cases = 0;
  for (Index n = 2; n <= 4; ++n) {
    for (const auto& edges : connected_edge_sets(n)) {
      const MjpParams params = random_mjp(n, edges, rng);
      const std::uint32_t limit = std::uint32_t{1} << (n - 1);
      for (std::uint32_t mask = 1; mask < limit; ++mask) {
        IndexSet j{0};
        for (Index v = 1; v < n; ++v) {
          if (mask & (std::uint32_t{1} << (v - 1))) j.push_back(v);
        }
        const RestrictionLawCheck check = compare_restriction_laws(params, 0, j, 4);
        worst_tv = std::max(worst_tv, check.tv);
        worst_missing = std::max(worst_missing, check.missing_mass);
        const Matrix p = restricted_transition(params, j);
        const Vector c = restrict_vector(params.total_weight(), j);
        const Matrix flux = c.asDiagonal() * p;
        worst_balance = std::max(worst_balance,
                                 (flux - flux.transpose()).cwiseAbs().maxCoeff() /
                                     flux.cwiseAbs().maxCoeff());
        worst_rows = std::max(worst_rows,
                              (p.rowwise().sum().array() - 1.0).abs().maxCoeff());
        ++cases;
      }
    }
  }
  out.push_back(verdict("exact restricted path law, graphs <= 4 vertices, k = 4",
                        worst_tv + worst_missing, 1e-9, cases,
                        "max TV plus unaccounted mass"));
  out.push_back(verdict("detailed balance of restricted parameters", worst_balance,
                        1e-12, cases));
  out.push_back(verdict("row sums of p^J", worst_rows, 1e-12, cases));

  // Simulated restriction against a chain run with the restricted parameters.
  const std::size_t n = scaled(scale, 20000);
  const MjpParams params = random_mjp(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}}, rng);
  const IndexSet j{0, 2, 3};
  const MjpParams reduced = drop_loop_params(restricted_params(params, j));
  std::vector<bool> in_j{true, false, true, true};
  Histogram via_path;
  Histogram via_params;
  Rng sim = make_stream(seed, 101);
  for (std::size_t s = 0; s < n; ++s) {
    MjpStepper full(params, 0);
    via_path.add(restricted_loop_free_prefix(
        full, [&sim](MjpStepper& st) { st.step(sim); }, in_j, 4));
    const JumpPath local = simulate_mjp(reduced, 0, 4, sim);
    PathKey key;
    for (Index a : local.states) key.push_back(j[static_cast<std::size_t>(a)]);
    via_params.add(key);
  }
  out.push_back(renamed(two_sample_tv(via_path, via_params),
                        "simulated restriction vs restricted parameters"));
  return out;
}

std::vector<TestVerdict> mixture_vrjp(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  const std::size_t n = scaled(scale, 20000);
  const WeightMatrix tri = triangle_graph(1.0, 0.5, 1.5).weight_matrix();
  out.push_back(renamed(two_sample_tv(vrjp_direct_histogram(tri, 0, 6, n, seed),
                                      vrjp_mixture_histogram(tri, 0, 6, n, seed)),
                        "triangle VRJP direct vs mixture, k = 6"));

  const WeightMatrix cyc = cycle4_graph().weight_matrix();
  const IndexSet j{0, 1, 2};
  const Histogram direct = restricted_vrjp_histogram(cyc, 0, j, 5, n, seed);
  out.push_back(renamed(
      two_sample_tv(direct, restricted_mixture_histogram(cyc, 0, j, 5, n, seed,
                                                         MixingForm::kWired)),
      "4-cycle restricted to {a,b,c} vs wired-field mixture, k = 5"));
  out.push_back(renamed(
      two_sample_tv(direct, restricted_mixture_histogram(cyc, 0, j, 5, n, seed,
                                                         MixingForm::kFull)),
      "4-cycle restricted to {a,b,c} vs full-field mixture, k = 5"));

  // Conditional chains: reversibility and p(beta) = e^{-u} (2 beta)^{-1} W e^{u}.
  Rng rng = make_stream(seed, 102);
  double worst_balance = 0.0;
  double worst_p = 0.0;
  const std::size_t draws = 200;
  for (std::size_t s = 0; s < draws; ++s) {
    const Vector beta = sample_beta(cyc, rng).beta;
    const Vector u = u_field(cyc, beta, 0);
    const MjpParams env = conductances(cyc, u);
    const Matrix flux = env.pi().asDiagonal() * env.rates();
    worst_balance = std::max(worst_balance, (flux - flux.transpose()).cwiseAbs().maxCoeff());
    const Vector eu = u.array().exp();
    Matrix expected = eu.cwiseInverse().asDiagonal() * cyc.matrix() * eu.asDiagonal();
    expected = (0.5 * beta.cwiseInverse()).asDiagonal() * expected;
    Matrix got = env.transition();
    // The identity holds away from rho, where beta_i is the total rate.
    got.row(0).setZero();
    expected.row(0).setZero();
    worst_p = std::max(worst_p, (got - expected).cwiseAbs().maxCoeff());
  }
  out.push_back(verdict("detailed balance of conditional chains", worst_balance,
                        1e-12, draws));
  out.push_back(verdict("p(beta) = e^-u (2 beta)^-1 W e^u off the pin", worst_p,
                        1e-10, draws));
  return out;
}

std::vector<TestVerdict> errw_gamma(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  const std::size_t n = scaled(scale, 20000);
  const Graph tri = triangle_graph(1.0, 1.0, 1.0);
  out.push_back(renamed(two_sample_tv(errw_histogram(tri, 0, 6, n, seed),
                                      errw_mixture_histogram(tri, 0, 6, n, seed)),
                        "triangle ERRW vs Gamma(1,1) VRJP mixture, k = 6"));
  Rng rng = make_stream(seed, 103);
  const std::size_t m = scaled(scale, 100000);
  for (double a : {0.5, 1.0, 2.0}) {
    std::vector<double> draws(m);
    for (double& x : draws) x = gamma_variate(rng, a, 1.0);
    for (double alpha : {0.25, 0.5, 1.0}) {
      std::vector<double> powers(m);
      std::transform(draws.begin(), draws.end(), powers.begin(),
                     [alpha](double x) { return std::pow(x, alpha); });
      const BatchEstimate est = batch_means(powers);
      const double target = std::exp(std::lgamma(a + alpha) - std::lgamma(a));
      out.push_back(mean_within_se("E[W^" + format_double(alpha) + "], a = " +
                                       format_double(a),
                                   est.mean, est.se, target, m));
    }
  }
  return out;
}

std::vector<TestVerdict> flow_oracle(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  const std::size_t n = scaled(scale, 4000);
  struct Case {
    const char* name;
    Graph g;
  };
  const Case cases[] = {{"single edge", single_edge_graph()}, {"path-3", path3_graph()}};
  for (const Case& c : cases) {
    const unsigned r = 2;
    std::vector<double> weights;
    for (Index k = 0; k < c.g.num_edges() * 4; ++k) weights.push_back(0.5 + 0.25 * k);
    const auto flow = flow_route_samples(c.g, weights, r, 0, n, seed);
    const auto schur = schur_route_samples(c.g, weights, r, 0, n, seed);
    const auto m = static_cast<std::size_t>(c.g.num_edges());
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<double> a;
      std::vector<double> b;
      for (std::size_t s = 0; s < n; ++s) {
        a.push_back(flow[s * m + e]);
        b.push_back(schur[s * m + e]);
      }
      out.push_back(renamed(ks_two_sample(a, b, 0.01),
                            std::string(c.name) + " r = 2, W^(0) edge " +
                                std::to_string(e) + ": flow vs Schur"));
    }
  }
  std::vector<double> tri_weights;
  for (int k = 0; k < 12; ++k) tri_weights.push_back(0.4 + 0.1 * k);
  out.push_back(verdict("coupled flow vs direct Schur, triangle r = 2",
                        coupled_flow_deviation(triangle_graph(), tri_weights, 2, 0,
                                               50, seed),
                        1e-10, 50, "max relative deviation incl. diagonal and loop betas"));

  Rng rng = make_stream(seed, 104);
  const Graph edge = single_edge_graph();
  const double w = 1.7;
  std::vector<double> ends(scaled(scale, 100000));
  for (double& x : ends) {
    x = run_flow(edge, initial_flow_state(edge, 1, {w, w}), 0, rng).weights[0];
  }
  const BatchEstimate est = batch_means(ends);
  out.push_back(mean_within_se("one step from W = w: E[W^(0)] = w / 2", est.mean,
                               est.se, w / 2.0, ends.size()));
  return out;
}

std::vector<TestVerdict> ig_appendix(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  Rng rng = make_stream(seed, 105);
  const std::size_t n = scaled(scale, 100000);

  for (const auto& [mu, lambda] : std::vector<std::pair<double, double>>{
           {0.1, 1.0}, {1.0, 1.0}, {10.0, 1.0}, {2.0, 0.5}}) {
    std::vector<double> draws(n);
    for (double& x : draws) x = ig_sample(IgParams{mu, lambda}, rng);
    const IgParams p{mu, lambda};
    out.push_back(renamed(ks_one_sample(draws, [p](double x) { return ig_cdf(x, p); }),
                          "IG(" + format_double(mu) + ", " + format_double(lambda) +
                              ") sampler vs CDF"));
  }

  // Laplace identity with X ~ IG(a/2, a^2/2): E[e^{(1-s)X}] = e^{a(1-sqrt s)}.
  const double a = 1.3;
  const IgParams p{a / 2.0, a * a / 2.0};
  std::vector<double> draws(n);
  for (double& x : draws) x = ig_sample(p, rng);
  for (double s : {0.5625, 1.0, 4.0}) {
    std::vector<double> values(n);
    std::transform(draws.begin(), draws.end(), values.begin(),
                   [s](double x) { return std::exp((1.0 - s) * x); });
    const BatchEstimate est = batch_means(values);
    out.push_back(mean_within_se("Laplace identity MC, s = " + format_double(s),
                                 est.mean, est.se, std::exp(a * (1.0 - std::sqrt(s))),
                                 n));
  }
  {
    const double s = 0.25;
    boost::math::quadrature::exp_sinh<double> integrator;
    const double value = integrator.integrate(
        [&](double x) {
          if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
          const double dev = x - p.mu;
          return std::exp(0.5 * std::log(p.lambda / (2.0 * std::numbers::pi)) -
                          1.5 * std::log(x) + (1.0 - s) * x -
                          p.lambda * dev * dev / (2.0 * p.mu * p.mu * x));
        });
    const double target = std::exp(a * (1.0 - std::sqrt(s)));
    out.push_back(verdict("Laplace identity by quadrature, s = 0.25",
                          std::abs(value - target) / target, 1e-8, 0));
  }

  double worst_frac = -1.0;
  for (double w : {1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
    for (double alpha : {0.0, 0.1, 0.25, 0.4, 0.6, 1.0}) {
      double bound = std::pow(w, -alpha);
      if (alpha < 0.5) bound = std::min(bound, c_alpha(alpha));
      worst_frac = std::max(worst_frac, frac_moment(w, alpha) - bound * (1.0 + 1e-12));
    }
  }
  out.push_back(verdict("E[X_W^alpha] <= min{W^-alpha, C_alpha} on grid",
                        worst_frac, 0.0, 42));
  out.push_back(verdict("E[X_W^1/4] at W = 1e-8 vs C_1/4",
                        std::abs(frac_moment(1e-8, 0.25) - c_alpha(0.25)), 1e-3, 0,
                        "the gap shrinks like W^(1/2)"));
  out.push_back(verdict("E[log X_W] at W = 1e-6 vs c_2",
                        std::abs(log_moment(1e-6) - kC2), 1e-3, 0));

  double worst_log = -1.0;
  const double small = 0.5 * std::exp(-kEulerGamma);
  for (int k = 0; k < 50; ++k) {
    const double w = std::pow(10.0, -6.0 + 7.0 * k / 49.0);
    const double v = log_moment(w);
    worst_log = std::max(worst_log, -std::log(w + 0.5) - v);
    worst_log = std::max(worst_log, v - std::min(-std::log(w), kC2));
    if (w <= small) {
      worst_log = std::max(worst_log, kC2 + 4.0 * w * (std::log(w) + kC2 - 1.0) - v);
    }
  }
  out.push_back(verdict("log-moment bounds on 50-point grid", worst_log, 1e-12, 50,
                        "largest violation (negative = all hold)"));

  {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double gamma = -integrator.integrate(
        [](double t) {
          return t > 0.0 && std::isfinite(t) ? std::exp(-t) * std::log(t) : 0.0;
        });
    out.push_back(verdict("c_2 vs quadrature of gamma + log 2",
                          std::abs(gamma + kLog2 - kC2), 1e-12, 0));
  }
  {
    std::vector<double> logs(n);
    for (double& x : logs) x = std::log(ig_sample(IgParams{1.0, 1.0}, rng));
    const BatchEstimate est = batch_means(logs);
    out.push_back(mean_within_se("E[log X_1] Monte Carlo", est.mean, est.se,
                                 log_moment(1.0), n));
  }
  return out;
}

std::vector<TestVerdict> bounds(std::uint64_t seed, double scale) {
  std::vector<TestVerdict> out;
  const BoundsCheck check = verify_bounds(4, 0, {0.1, 0.25, 0.4, 1.0},
                                          WeightDistribution::parse("gamma:a=1"),
                                          scaled(scale, 4000), seed);
  std::size_t bad = 0;
  for (const LevelMoments& row : check.rows) {
    bad += !(row.phase1_ok && row.combined_ok && row.log_ok);
  }
  out.push_back(verdict("MC moments within bounds + 4 SE, r = 4, Gamma(1,1)",
                        static_cast<double>(bad), 0.0, check.rows.size(),
                        "rows violating a bound"));

  Rng rng = make_stream(seed, 106);
  std::size_t mismatches = 0;
  const std::size_t tuples = 500;
  for (std::size_t t = 0; t < tuples; ++t) {
    const double alpha = 0.01 + 0.48 * uniform01(rng);
    const double moment = std::exp(-12.0 + 16.0 * uniform01(rng));
    const double mean_log = -20.0 + 24.0 * uniform01(rng);
    const auto r = static_cast<unsigned>(uniform01(rng) * 16.0);
    const auto l = static_cast<unsigned>(uniform01(rng) * (r + 1));
    const BoundReport b = moment_bound(alpha, moment, mean_log, r, l);
    mismatches += *b.m0 != b.argmin_combined;
    mismatches += b.m1 != b.argmin_log;
  }
  out.push_back(verdict("m0, m1 clamping rule equals explicit argmin",
                        static_cast<double>(mismatches), 0.0, tuples));

  std::size_t wrong = 0;
  std::size_t grid = 0;
  for (double alpha : {0.05, 0.1, 0.2, 0.3, 0.4, 0.45}) {
    for (int k = 0; k < 41; ++k) {
      const double moment = std::pow(10.0, -2.0 + 3.0 * k / 40.0);
      const bool tighter = one_step_linear(alpha, moment) < one_step_quadratic(alpha, moment);
      wrong += tighter != linear_step_is_tighter(alpha, moment);
      ++grid;
    }
  }
  out.push_back(verdict("crossover E > 2^-alpha / C_alpha predicts tighter bound",
                        static_cast<double>(wrong), 0.0, grid));
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{
      "restriction-mjp", "mixture-vrjp", "errw-gamma", "flow-oracle", "ig-appendix", "bounds"};
  return names;
}

bool is_verify_suite(const std::string& name) {
  const auto& names = verify_suites();
  return std::find(names.begin(), names.end(), name) != names.end();
}

SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed,
                             double scale) {
  require(scale > 0.0, "sample scale must be positive");
  SuiteResult result;
  result.suite = name;
  if (name == "restriction-mjp") {
    result.checks = restriction_mjp(seed, scale);
  } else if (name == "mixture-vrjp") {
    result.checks = mixture_vrjp(seed, scale);
  } else if (name == "errw-gamma") {
    result.checks = errw_gamma(seed, scale);
  } else if (name == "flow-oracle") {
    result.checks = flow_oracle(seed, scale);
  } else if (name == "ig-appendix") {
    result.checks = ig_appendix(seed, scale);
  } else if (name == "bounds") {
    result.checks = bounds(seed, scale);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown verify suite '" + name + "'");
  }
  result.pass = std::all_of(result.checks.begin(), result.checks.end(),
                            [](const TestVerdict& v) { return v.pass; });
  return result;
}

std::string suite_json(const SuiteResult& result, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["suite"] = result.suite;
  doc["seed"] = seed;
  doc["pass"] = result.pass;
  auto& checks = doc["checks"] = nlohmann::ordered_json::array();
  for (const TestVerdict& v : result.checks) {
    nlohmann::ordered_json j;
    j["name"] = v.name;
    j["statistic"] = v.statistic;
    j["threshold"] = v.threshold;
    j["pass"] = v.pass;
    j["n"] = v.n;
    j["notes"] = v.notes;
    checks.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace rproc
