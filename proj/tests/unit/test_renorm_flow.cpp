#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "core/error.hpp"
#include "core/inv_gauss.hpp"
#include "core/reinforced.hpp"
#include "core/renorm_flow.hpp"
#include "harness/experiments.hpp"
#include "harness/stats.hpp"

using namespace rproc;

namespace {

std::vector<double> column(const std::vector<double>& rows, std::size_t width, std::size_t c) {
  std::vector<double> out;
  for (std::size_t k = c; k < rows.size(); k += width) out.push_back(rows[k]);
  return out;
}

}  // namespace

TEST_CASE("one coupled step with a fixed midpoint beta") {
  const Graph edge = single_edge_graph();
  Vector beta(3);
  beta << 1.0, 1.0, 1.0;
  const FlowState s = initial_flow_state(edge, 1, {1.0, 1.0}, beta);
  Rng rng = make_stream(61);
  const FlowState t = flow_step(edge, s, rng);
  CHECK(t.level == 0);
  REQUIRE(t.weights.size() == 1);
  CHECK(t.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.base_loops[0] == doctest::Approx(0.5));
  CHECK(t.base_loops[1] == doctest::Approx(0.5));
}

TEST_CASE("run_flow with r = l is the identity") {
  const Graph g = path3_graph();
  const FlowState s = initial_flow_state(g, 2, std::vector<double>(8, 0.7));
  Rng rng = make_stream(62);
  const FlowState t = run_flow(g, s, 2, rng);
  CHECK(t.level == 2);
  CHECK(t.weights == s.weights);
  CHECK(t.interior_loops == s.interior_loops);
}

TEST_CASE("flow and Schur routes agree in law") {
  struct Case {
    Graph g;
    std::size_t edges;
  };
  for (const Case& c : {Case{single_edge_graph(), 1}, Case{path3_graph(), 2},
                        Case{triangle_graph(), 3}}) {
    for (unsigned r = 1; r <= 2; ++r) {
      const std::size_t m = c.edges << r;
      std::vector<double> level_r(m);
      for (std::size_t k = 0; k < m; ++k) level_r[k] = 0.5 + 0.25 * static_cast<double>(k % 5);
      const auto a = flow_route_samples(c.g, level_r, r, 0, 4000, 71 + r);
      const auto b = schur_route_samples(c.g, level_r, r, 0, 4000, 81 + r);
      for (std::size_t e = 0; e < c.edges; ++e) {
        const TestVerdict v = ks_two_sample(column(a, c.edges, e), column(b, c.edges, e));
        CHECK_MESSAGE(v.pass, "r=", r, " edge ", e, " ", v.notes);
      }
    }
  }
}

TEST_CASE("coupled flow reproduces the direct reduction") {
  CHECK(coupled_flow_deviation(triangle_graph(1.0, 0.5, 1.5), std::vector<double>(12, 0.8), 2,
                               0, 20, 91) < 1e-10);
  std::vector<double> w(16);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = 0.3 + 0.1 * static_cast<double>(k);
  CHECK(coupled_flow_deviation(path3_graph(), w, 3, 1, 20, 92) < 1e-10);
}

TEST_CASE("coupled mode rejects an inconsistent beta") {
  const Graph g = single_edge_graph();
  Vector beta = Vector::Constant(5, 0.3);
  FlowState s = initial_flow_state(g, 2, {1.0, 1.0, 1.0, 1.0}, beta);
  Rng rng = make_stream(93);
  CHECK_THROWS_AS(flow_step(g, s, rng), Error);
}

TEST_CASE("one step mean is w / 2") {
  const double w = 1.7;
  const Graph g = single_edge_graph();
  Rng rng = make_stream(94);
  std::vector<double> out;
  for (int k = 0; k < 64000; ++k) {
    const FlowState s = initial_flow_state(g, 1, {w, w});
    out.push_back(flow_step(g, s, rng).weights[0]);
  }
  const BatchEstimate est = batch_means(out);
  CHECK(mean_within_se("mean", est.mean, est.se, w / 2.0, out.size()).pass);
}

TEST_CASE("output weights of i.i.d. inputs are independent") {
  const Graph g = single_edge_graph();
  const WeightDistribution dist = WeightDistribution::parse("gamma:a=1");
  Rng rng = make_stream(95);
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 0; k < 300; ++k) {
    std::vector<double> w(4);
    for (double& v : w) v = dist.sample(rng);
    const FlowState t = flow_step(g, initial_flow_state(g, 2, w), rng);
    x.push_back(t.weights[0]);
    y.push_back(t.weights[1]);
  }
  CHECK(dcor_independence(x, y, rng).pass);

  std::vector<double> u(300);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = x[k] + 0.1 * y[k];
  CHECK_FALSE(dcor_independence(x, u, rng).pass);
}

TEST_CASE("VRJP on the subdivision restricted to the base level") {
  const Graph base = triangle_graph(1.0, 0.5, 1.5);
  const SubdividedGraph sg(base, 1);
  const std::vector<double> level_r = sg.inherited_weights();
  const WeightMatrix w1 = sg.weight_matrix(level_r);
  const IndexSet j = sg.level_vertices(0);
  const unsigned k = 5;
  const std::size_t n = 20000;
  const Histogram direct = restricted_vrjp_histogram(w1, 0, j, k, n, 96);

  Rng rng = make_stream(97);
  Histogram flowed;
  for (std::size_t s = 0; s < n; ++s) {
    const FlowState t = run_flow(base, initial_flow_state(base, 1, level_r), 0, rng);
    const WeightMatrix w0 = flow_weight_matrix(base, t).without_diagonal();
    const JumpPath p = simulate_vrjp_direct(w0, 0, k, rng);
    flowed.add(p.states);
  }
  CHECK(two_sample_tv(direct, flowed).pass);
}

TEST_CASE("moment bound formulas") {
  CHECK(phase1_bound(1.0, 1.0, 5, 2) == doctest::Approx(0.125));
  const double alpha = 0.25;
  const double moment = (1.0 + 1e-9) / c_alpha(alpha);
  CHECK(minimizer_m0(alpha, moment, 9, 0) == 7);
  const BoundReport b = moment_bound(0.3, 0.8, -0.4, 6, 2);
  REQUIRE(b.combined.has_value());
  CHECK(std::exp(b.combined_log_terms.front()) / c_alpha(0.3) ==
        doctest::Approx(b.phase1).epsilon(1e-13));
  CHECK(*b.combined <= b.phase1 * (1.0 + 1e-13));
  CHECK(b.combined_log_terms.size() == 5);
  CHECK(b.log_terms.front() == doctest::Approx(-0.4 - 4.0 * kLog2));
  CHECK_FALSE(moment_bound(0.7, 0.8, -0.4, 6, 2).combined.has_value());
  CHECK_THROWS_AS(moment_bound(1.2, 0.8, -0.4, 6, 2), Error);
  CHECK_THROWS_AS(moment_bound(0.3, 0.8, -0.4, 2, 6), Error);
}

TEST_CASE("minimizers reproduce the argmin of the explicit arrays") {
  Rng rng = make_stream(98);
  std::uniform_real_distribution<double> a(0.02, 0.48);
  std::uniform_real_distribution<double> logm(-12.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const unsigned l = static_cast<unsigned>(rng() % 5);
    const unsigned r = l + static_cast<unsigned>(rng() % 10);
    const double alpha = a(rng);
    const double moment = std::exp(logm(rng));
    const double mean_log = logm(rng);
    const BoundReport b = moment_bound(alpha, moment, mean_log, r, l);
    CHECK(*b.m0 == b.argmin_combined);
    CHECK(b.m1 == b.argmin_log);
  }
}

TEST_CASE("one-step bounds and the crossover") {
  CHECK(one_step_linear(0.25, 1.0) == doctest::Approx(std::exp2(-0.25)));
  CHECK(one_step_quadratic(0.25, 1.0) == doctest::Approx(c_alpha(0.25)));
  CHECK(one_step_log(-1.0) == doctest::Approx(std::min(-1.0 - kLog2, -2.0 + kC2)));
  for (double alpha : {0.1, 0.25, 0.4}) {
    const double cut = std::exp2(-alpha) / c_alpha(alpha);
    for (double f : {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}) {
      const double e = cut * f;
      CHECK(linear_step_is_tighter(alpha, e) ==
            (one_step_linear(alpha, e) < one_step_quadratic(alpha, e)));
    }
  }
}

TEST_CASE("Monte Carlo moments stay below the bounds") {
  const WeightDistribution dist = WeightDistribution::parse("gamma:a=1");
  const BoundsCheck check = verify_bounds(4, 0, {0.1, 0.25, 0.4, 1.0}, dist, 4000, 99);
  CHECK(check.all_ok);
  CHECK(check.rows.size() == 20);
  for (std::size_t k = 0; k + 1 < check.rows.size(); ++k) {
    const LevelMoments& a = check.rows[k];
    const LevelMoments& b = check.rows[k + 1];
    if (a.alpha == b.alpha) {
      CHECK(b.level + 1 == a.level);
      CHECK(b.mc_moment <= a.mc_moment);
    }
  }

  const WeightDistribution one = WeightDistribution::parse("const:w=1");
  const BoundsCheck step = verify_bounds(1, 0, {0.25}, one, 8000, 100);
  CHECK(step.all_ok);
  const LevelMoments& last = step.rows.back();
  CHECK(last.mc_moment <= std::exp2(-0.25) + 4.0 * last.mc_se);
  CHECK(last.mc_moment <= c_alpha(0.25) + 4.0 * last.mc_se);
  CHECK(last.mc_log <= one_step_log(0.0) + 4.0 * last.mc_log_se);
}

TEST_CASE("small weights decay doubly exponentially") {
  const WeightDistribution dist = WeightDistribution::parse("const:w=0.05");
  const BoundsCheck check = verify_bounds(4, 0, {0.25}, dist, 4000, 101);
  std::vector<double> logs;
  for (const LevelMoments& row : check.rows) logs.push_back(std::log(row.mc_moment));
  for (std::size_t k = 0; k + 2 < logs.size(); ++k) {
    CHECK(logs[k + 1] < logs[k]);
    CHECK(logs[k + 2] - logs[k + 1] < logs[k + 1] - logs[k]);
  }
}

TEST_CASE("weight distributions") {
  const WeightDistribution g = WeightDistribution::parse("gamma:a=2");
  CHECK(g.describe() == "gamma:a=2");
  CHECK(g.moment(0.25) ==
        doctest::Approx(boost::math::tgamma(2.25) / boost::math::tgamma(2.0)).epsilon(1e-13));
  CHECK(g.mean_log() == doctest::Approx(1.0 - kEulerGamma).epsilon(1e-13));
  const WeightDistribution c = WeightDistribution::parse("const:w=3");
  CHECK(c.moment(0.5) == doctest::Approx(std::sqrt(3.0)));
  CHECK(c.mean_log() == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(WeightDistribution::parse("uniform:a=1"), Error);
  CHECK_THROWS_AS(WeightDistribution::parse("gamma:a=-1"), Error);
}

TEST_CASE("recurrence threshold") {
  CHECK(recurrence_threshold(4, 0.25, 2.0, 1.5, 3, 3).required_gap == 0);
  CHECK(recurrence_threshold(4, 0.25, 2.0, 1.5, 3, 3).holds);
  const RecurrenceCheck five = recurrence_threshold(4, 0.2, 1.3, 1.3 * std::exp2(0.2 * 5), 9, 6);
  CHECK(five.required_gap == 5);
  CHECK_FALSE(five.holds);
  CHECK(recurrence_threshold(4, 0.2, 1.3, 1.3 * std::exp2(0.2 * 5), 9, 4).holds);
  const double errw = boost::math::tgamma(0.5 + 0.25) / boost::math::tgamma(0.5);
  CHECK(WeightDistribution::parse("gamma:a=0.5").moment(0.25) == doctest::Approx(errw));
  CHECK_THROWS_AS(recurrence_threshold(4, 0.3, 1.0, 1.0, 1, 0), Error);
  CHECK_THROWS_AS(recurrence_threshold(4, 0.2, 0.0, 1.0, 1, 0), Error);
}

TEST_CASE("batch means") {
  std::vector<double> v(64);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k % 2);
  const BatchEstimate e = batch_means(v);
  CHECK(e.mean == doctest::Approx(0.5));
  CHECK(e.se == doctest::Approx(0.0));
  CHECK_THROWS_AS(batch_means(std::vector<double>(10, 1.0)), Error);
}
