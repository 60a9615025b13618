#include "core/renorm_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "core/error.hpp"
#include "core/inv_gauss.hpp"

namespace rproc {

namespace {

std::size_t pieces(unsigned l) { return std::size_t{1} << l; }

}  // namespace

FlowState initial_flow_state(const Graph& base, unsigned r,
                             std::vector<double> edge_weights,
                             const std::optional<Vector>& beta) {
  require(r < 31, "subdivision level too large", ErrorCode::kOutOfRange);
  const auto m = static_cast<std::size_t>(base.num_edges());
  const auto n = static_cast<std::size_t>(base.num_vertices());
  require(edge_weights.size() == m * pieces(r),
          "need one weight per edge of E_r (" + std::to_string(m * pieces(r)) +
              ")");
  for (double w : edge_weights) {
    require(std::isfinite(w) && w > 0.0, "edge weights must be positive");
  }
  FlowState state;
  state.level = r;
  state.weights = std::move(edge_weights);
  state.base_loops.assign(n, 0.0);
  state.interior_loops.assign(m * (pieces(r) - 1), 0.0);
  if (beta) {
    require(static_cast<std::size_t>(beta->size()) == n + m * (pieces(r) - 1),
            "beta must cover every vertex of Lambda_r");
    state.loop_betas.emplace(beta->data() + n, beta->data() + beta->size());
  }
  return state;
}

FlowState flow_step(const Graph& base, const FlowState& state, Rng& rng) {
  const unsigned l = state.level;
  require(l >= 1, "flow_step needs a state at level l >= 1");
  const std::size_t p = pieces(l);
  const std::size_t q = pieces(l - 1);
  const auto m = static_cast<std::size_t>(base.num_edges());
  require(state.weights.size() == m * p, "flow state does not match the graph");
  const bool coupled = state.loop_betas.has_value();

  // g[e * q + j - 1] = (2 beta_v)^{-1} at the midpoint v of the j-th level
  // l-1 edge, i.e. at v_{e, (2j-1)/2^l}.
  std::vector<double> g(m * q);
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t j = 1; j <= q; ++j) {
      const double w1 = state.weights[e * p + 2 * j - 2];
      const double w2 = state.weights[e * p + 2 * j - 1];
      double draw = 0.0;
      if (coupled) {
        const double b = (*state.loop_betas)[e * (p - 1) + 2 * j - 2];
        if (!(b > 0.0)) fail(ErrorCode::kNumerical, "nonpositive loop beta");
        draw = 0.5 / b;
      } else {
        draw = ig_sample(IgParams{1.0 / (w1 + w2), 1.0}, rng);
      }
      g[e * q + j - 1] = draw;
    }
  }

  FlowState next;
  next.level = l - 1;
  next.weights.resize(m * q);
  next.base_loops = state.base_loops;
  next.interior_loops.resize(m * (q - 1));
  if (coupled) next.loop_betas.emplace(m * (q - 1));

  for (std::size_t e = 0; e < m; ++e) {
    const double* w = state.weights.data() + e * p;
    const double* ge = g.data() + e * q;
    for (std::size_t j = 1; j <= q; ++j) {
      next.weights[e * q + j - 1] = w[2 * j - 2] * w[2 * j - 1] * ge[j - 1];
    }
    // Surviving v_{e, j/2^(l-1)} = v_{e, 2j/2^l}: neighbors 2j-1 and 2j+1.
    for (std::size_t j = 1; j < q; ++j) {
      const double delta = w[2 * j - 1] * w[2 * j - 1] * ge[j - 1] +
                           w[2 * j] * w[2 * j] * ge[j];
      const std::size_t from = e * (p - 1) + 2 * j - 1;
      const std::size_t to = e * (q - 1) + j - 1;
      next.interior_loops[to] = state.interior_loops[from] + delta;
      if (coupled) {
        const double b = (*state.loop_betas)[from] - 0.5 * delta;
        if (!(b > 0.0)) {
          fail(ErrorCode::kNumerical,
               "updated loop beta is not positive; the beta field is "
               "inconsistent with the weights");
        }
        (*next.loop_betas)[to] = b;
      }
    }
    const Edge& edge = base.edges()[e];
    next.base_loops[static_cast<std::size_t>(edge.u)] += w[0] * w[0] * ge[0];
    next.base_loops[static_cast<std::size_t>(edge.v)] +=
        w[p - 1] * w[p - 1] * ge[q - 1];
  }
  return next;
}

FlowState run_flow(const Graph& base, FlowState state, unsigned l, Rng& rng) {
  require(l <= state.level, "target level must not exceed the current level");
  while (state.level > l) state = flow_step(base, state, rng);
  return state;
}

WeightMatrix flow_weight_matrix(const Graph& base, const FlowState& state) {
  const SubdividedGraph sub(base, state.level);
  Matrix w = sub.weight_matrix(state.weights).matrix();
  const Index n = base.num_vertices();
  for (Index v = 0; v < n; ++v) w(v, v) = state.base_loops[static_cast<std::size_t>(v)];
  for (std::size_t k = 0; k < state.interior_loops.size(); ++k) {
    const Index v = n + static_cast<Index>(k);
    w(v, v) = state.interior_loops[k];
  }
  return WeightMatrix(std::move(w));
}

WeightDistribution WeightDistribution::parse(const std::string& text) {
  const auto colon = text.find(':');
  const auto eq = text.find('=');
  if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
    fail(ErrorCode::kParse,
         "weight law must look like gamma:a=<shape> or const:w=<value>, got '" +
             text + "'");
  }
  const std::string name = text.substr(0, colon);
  const std::string key = text.substr(colon + 1, eq - colon - 1);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(eq + 1), &used);
    if (used != text.size() - eq - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, "bad number in weight law '" + text + "'");
  }
  require(std::isfinite(value) && value > 0.0,
          "weight law parameter must be positive");
  WeightDistribution d;
  d.parameter = value;
  if (name == "gamma" && key == "a") {
    d.kind = Kind::kGamma;
  } else if (name == "const" && key == "w") {
    d.kind = Kind::kConstant;
  } else {
    fail(ErrorCode::kParse, "unknown weight law '" + text + "'");
  }
  return d;
}

std::string WeightDistribution::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g",
                kind == Kind::kGamma ? "gamma:a" : "const:w", parameter);
  return buf;
}

double WeightDistribution::sample(Rng& rng) const {
  return kind == Kind::kGamma ? gamma_variate(rng, parameter, 1.0) : parameter;
}

double WeightDistribution::moment(double alpha) const {
  if (kind == Kind::kConstant) return std::pow(parameter, alpha);
  return std::exp(std::lgamma(parameter + alpha) - std::lgamma(parameter));
}

double WeightDistribution::mean_log() const {
  if (kind == Kind::kConstant) return std::log(parameter);
  return boost::math::digamma(parameter);
}

double phase1_bound(double alpha, double moment, unsigned r, unsigned l) {
  require(alpha >= 0.0 && alpha <= 1.0, "phase-1 bound needs alpha in [0, 1]",
          ErrorCode::kOutOfRange);
  require(l <= r, "need l <= r");
  return std::exp2(-alpha * static_cast<double>(r - l)) * moment;
}

namespace {

unsigned clamp_level(double m, unsigned r, unsigned l) {
  if (!(m >= static_cast<double>(l))) return l;
  if (m >= static_cast<double>(r)) return r;
  return static_cast<unsigned>(m);
}

}  // namespace

unsigned minimizer_m0(double alpha, double moment, unsigned r, unsigned l) {
  require(alpha > 0.0 && alpha < 0.5, "m0 needs alpha in (0, 1/2)",
          ErrorCode::kOutOfRange);
  require(l <= r, "need l <= r");
  const double v = std::floor(std::log2(c_alpha(alpha) * moment) / alpha);
  return clamp_level(static_cast<double>(r) - 2.0 - v, r, l);
}

unsigned minimizer_m1(double mean_log, unsigned r, unsigned l) {
  require(l <= r, "need l <= r");
  const double v = std::floor((mean_log + kC2) / kLog2);
  return clamp_level(static_cast<double>(r) - 2.0 - v, r, l);
}

BoundReport moment_bound(double alpha, double moment, double mean_log,
                         unsigned r, unsigned l) {
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]",
          ErrorCode::kOutOfRange);
  require(l <= r, "need l <= r");
  require(std::isfinite(moment) && moment > 0.0, "moment must be positive");
  require(std::isfinite(mean_log), "log moment must be finite");
  BoundReport out;
  out.alpha = alpha;
  out.r = r;
  out.l = l;
  out.moment = moment;
  out.mean_log = mean_log;
  out.phase1 = phase1_bound(alpha, moment, r, l);

  if (alpha < 0.5) {
    const double log_c = std::log(c_alpha(alpha));
    double best = std::numeric_limits<double>::infinity();
    for (unsigned m = l; m <= r; ++m) {
      const double t = std::ldexp(1.0, static_cast<int>(m - l)) *
                       (log_c - alpha * (r - m) * kLog2 + std::log(moment));
      out.combined_log_terms.push_back(t);
      if (t < best) {
        best = t;
        out.argmin_combined = m;
      }
    }
    out.combined = std::exp(best - log_c);
    if (alpha > 0.0) out.m0 = minimizer_m0(alpha, moment, r, l);
  }

  double best = std::numeric_limits<double>::infinity();
  for (unsigned m = l; m <= r; ++m) {
    const double t = std::ldexp(1.0, static_cast<int>(m - l)) *
                         (mean_log - (r - m) * kLog2 + kC2) -
                     kC2;
    out.log_terms.push_back(t);
    if (t < best) {
      best = t;
      out.argmin_log = m;
    }
  }
  out.log_bound = best;
  out.m1 = minimizer_m1(mean_log, r, l);
  return out;
}

double one_step_linear(double alpha, double moment) {
  return std::exp2(-alpha) * moment;
}

double one_step_quadratic(double alpha, double moment) {
  return c_alpha(alpha) * moment * moment;
}

double one_step_log(double mean_log) {
  return std::min(mean_log - kLog2, 2.0 * mean_log + kC2);
}

bool linear_step_is_tighter(double alpha, double moment) {
  return moment > std::exp2(-alpha) / c_alpha(alpha);
}

BatchEstimate batch_means(const std::vector<double>& values, unsigned batches) {
  require(batches >= 2 && values.size() >= batches,
          "batch means needs at least one value per batch");
  BatchEstimate out;
  double total = 0.0;
  for (double v : values) total += v;
  out.mean = total / static_cast<double>(values.size());
  const std::size_t size = values.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (unsigned b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t k = b * size; k < (b + 1) * size; ++k) s += values[k];
    means[b] = s / static_cast<double>(size);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  out.se = std::sqrt(ss / (batches - 1) / batches);
  return out;
}

BoundsCheck verify_bounds(unsigned r, unsigned l, const std::vector<double>& alphas,
                          const WeightDistribution& dist, std::size_t samples,
                          std::uint64_t seed) {
  require(l <= r && r <= 16, "need l <= r <= 16", ErrorCode::kOutOfRange);
  require(samples >= kBatches, "too few samples for batch means");
  for (double a : alphas) {
    require(a >= 0.0 && a <= 1.0, "alpha must lie in [0, 1]",
            ErrorCode::kOutOfRange);
  }
  const Graph edge({"a", "b"}, {Edge{0, 1, 1.0}});
  const std::size_t levels = r - l + 1;
  // values[(a * levels + (r - m)) * samples + s]
  std::vector<double> powers(alphas.size() * levels * samples);
  std::vector<double> logs(levels * samples);

  Rng rng = make_stream(seed, 0);
  std::vector<double> init(pieces(r));
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& w : init) w = dist.sample(rng);
    FlowState state = initial_flow_state(edge, r, init);
    for (unsigned m = r;; --m) {
      const std::size_t row = r - m;
      const double count = static_cast<double>(state.weights.size());
      double log_sum = 0.0;
      for (double w : state.weights) log_sum += std::log(w);
      logs[row * samples + s] = log_sum / count;
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        double sum = 0.0;
        for (double w : state.weights) sum += std::pow(w, alphas[a]);
        powers[(a * levels + row) * samples + s] = sum / count;
      }
      if (m == l) break;
      state = flow_step(edge, state, rng);
    }
  }

  BoundsCheck out;
  std::vector<double> column(samples);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (unsigned m = r;; --m) {
      const std::size_t row = r - m;
      LevelMoments lm;
      lm.level = m;
      lm.alpha = alphas[a];
      std::copy_n(powers.begin() + static_cast<std::ptrdiff_t>((a * levels + row) * samples),
                  samples, column.begin());
      const BatchEstimate pe = batch_means(column);
      std::copy_n(logs.begin() + static_cast<std::ptrdiff_t>(row * samples),
                  samples, column.begin());
      const BatchEstimate le = batch_means(column);
      lm.mc_moment = pe.mean;
      lm.mc_se = pe.se;
      lm.mc_log = le.mean;
      lm.mc_log_se = le.se;
      lm.bounds = moment_bound(alphas[a], dist.moment(alphas[a]), dist.mean_log(), r, m);
      const double slack = kSeMultiplier * pe.se;
      lm.phase1_ok = lm.mc_moment <= lm.bounds.phase1 + slack;
      lm.combined_ok =
          !lm.bounds.combined || lm.mc_moment <= *lm.bounds.combined + slack;
      lm.log_ok = lm.mc_log <= lm.bounds.log_bound + kSeMultiplier * le.se;
      out.all_ok = out.all_ok && lm.phase1_ok && lm.combined_ok && lm.log_ok;
      out.rows.push_back(std::move(lm));
      if (m == l) break;
    }
  }
  return out;
}

RecurrenceCheck recurrence_threshold(unsigned d, double alpha, double c3,
                                     double moment, unsigned r, unsigned l) {
  require(d >= 1, "maximal degree must be at least 1");
  require(alpha > 0.0 && alpha <= 0.25, "alpha must lie in (0, 1/4]",
          ErrorCode::kOutOfRange);
  require(std::isfinite(c3) && c3 > 0.0, "c3 must be positive");
  require(std::isfinite(moment) && moment > 0.0, "moment must be positive");
  require(l <= r, "need l <= r");
  const auto satisfied = [&](double gap) {
    return moment <= c3 * std::exp2(alpha * gap);
  };
  RecurrenceCheck out;
  out.holds = satisfied(static_cast<double>(r - l));
  const double x = std::log2(moment / c3) / alpha;
  if (x > 0.0) {
    require(x < 1e9, "required gap is out of range", ErrorCode::kOutOfRange);
    auto gap = static_cast<unsigned>(std::ceil(x));
    while (gap > 0 && satisfied(static_cast<double>(gap - 1))) --gap;
    while (!satisfied(static_cast<double>(gap))) ++gap;
    out.required_gap = gap;
  }
  return out;
}

}  // namespace rproc
