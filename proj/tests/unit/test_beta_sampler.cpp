#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "core/beta_sampler.hpp"
#include "core/inv_gauss.hpp"
#include "core/linalg.hpp"
#include "harness/experiments.hpp"
#include "harness/stats.hpp"

using namespace rproc;

namespace {

// Triangle with a pendant and a loop at vertex 1.
WeightMatrix loopy_graph() {
  Matrix m = triangle_pendant_graph().weight_matrix().matrix();
  m(1, 1) = 0.8;
  return WeightMatrix(m);
}

std::vector<std::vector<double>> draw(const WeightMatrix& w, std::size_t n, Rng& rng,
                                      std::optional<std::span<const Index>> order =
                                          std::nullopt) {
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(w.size()));
  for (std::size_t s = 0; s < n; ++s) {
    const NuSample x = sample_beta(w, rng, order);
    REQUIRE(is_positive_definite(h_matrix(w, x.beta)));
    for (Index i = 0; i < w.size(); ++i) cols[i].push_back(x.beta(i));
  }
  return cols;
}

// Pearson homogeneity test of two samples of pairs on a 4 x 4 grid cut at
// the pooled quartiles of each coordinate.
double homogeneity_p_value(const std::vector<double>& ax, const std::vector<double>& ay,
                           const std::vector<double>& bx, const std::vector<double>& by) {
  const auto cuts = [](std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return std::vector<double>{a[a.size() / 4], a[a.size() / 2], a[3 * a.size() / 4]};
  };
  const auto cx = cuts(ax, bx);
  const auto cy = cuts(ay, by);
  const auto cell = [](const std::vector<double>& c, double v) {
    return static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), v) - c.begin());
  };
  double ca[16] = {};
  double cb[16] = {};
  for (std::size_t k = 0; k < ax.size(); ++k) ca[4 * cell(cx, ax[k]) + cell(cy, ay[k])] += 1;
  for (std::size_t k = 0; k < bx.size(); ++k) cb[4 * cell(cx, bx[k]) + cell(cy, by[k])] += 1;
  const double na = static_cast<double>(ax.size());
  const double nb = static_cast<double>(bx.size());
  double stat = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double pooled = (ca[k] + cb[k]) / (na + nb);
    if (pooled == 0.0) continue;
    stat += (ca[k] - na * pooled) * (ca[k] - na * pooled) / (na * pooled);
    stat += (cb[k] - nb * pooled) * (cb[k] - nb * pooled) / (nb * pooled);
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(15.0), stat));
}

}  // namespace

TEST_CASE("nu density basics") {
  Matrix w(2, 2);
  w << 0, 3, 3, 0;
  CHECK(nu_density(WeightMatrix(w), Vector::Ones(2)) == 0.0);

  const auto one = [](double b) {
    return nu_density(WeightMatrix::zero(1), Vector::Constant(1, b));
  };
  CHECK(one(0.7) == doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846) *
                                    std::exp(-0.7) / std::sqrt(1.4)));
  const double mass = boost::math::quadrature::tanh_sinh<double>().integrate(
      [&](double b) { return b > 0.0 ? one(b) : 0.0; }, 0.0,
      std::numeric_limits<double>::infinity());
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  Rng rng = make_stream(31);
  const WeightMatrix lw = loopy_graph();
  const Vector beta = sample_beta(lw, rng).beta;
  const Matrix h = h_matrix(lw, beta);
  const double quadratic = h.sum();
  const double direct = 2.0 * beta.sum() - lw.matrix().sum();
  CHECK(quadratic == doctest::Approx(direct).epsilon(1e-13));
  const double expected = 2.0 * std::log(2.0 / 3.14159265358979323846) - 0.5 * direct -
                          0.5 * std::log(h.determinant());
  CHECK(nu_log_density(lw, beta) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("marginals of beta are inverse Gaussian") {
  Rng rng = make_stream(32);
  const WeightMatrix w = loopy_graph();
  const auto cols = draw(w, 20000, rng);
  for (Index i = 0; i < w.size(); ++i) {
    std::vector<double> g;
    for (double b : cols[i]) g.push_back(1.0 / (2.0 * b - w(i, i)));
    const IgParams p = IgParams::make(1.0 / w.off_diagonal_sum(i), 1.0);
    const TestVerdict v = ks_one_sample(g, [&](double x) { return ig_cdf(x, p); });
    CHECK_MESSAGE(v.pass, "vertex ", i, " D=", v.statistic);
  }
}

TEST_CASE("self-loop shift") {
  Rng rng = make_stream(33);
  const WeightMatrix w = loopy_graph();
  const auto with = draw(w, 20000, rng);
  const auto without = draw(w.without_diagonal(), 20000, rng);
  for (Index i = 0; i < w.size(); ++i) {
    std::vector<double> shifted;
    for (double b : with[i]) shifted.push_back(b - 0.5 * w(i, i));
    CHECK(ks_two_sample(shifted, without[i]).pass);
  }
}

TEST_CASE("two-vertex joint law against the density") {
  const double w = 1.0;
  Matrix m(2, 2);
  m << 0, w, w, 0;
  const std::vector<double> edges{0.0, 0.3, 0.6, 1.0, 1.6, 2.5, 40.0};
  const std::size_t bins = edges.size() - 1;
  // P(b1 in A, b2 in B) with b2 = (s^2 + w^2) / (4 b1), which removes the
  // 1/sqrt(det H) singularity at the boundary of positive definiteness.
  const auto cell = [&](std::size_t a, std::size_t b) {
    const auto inner = [&](double b1) {
      const auto s_of = [&](double b2) {
        return std::sqrt(std::max(0.0, 4.0 * b1 * b2 - w * w));
      };
      const double lo = s_of(edges[b]);
      const double hi = s_of(edges[b + 1]);
      if (hi <= lo) return 0.0;
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double s) {
            const double b2 = (s * s + w * w) / (4.0 * b1);
            return (2.0 / 3.14159265358979323846) * std::exp(-b1 - b2 + w) / (2.0 * b1);
          },
          lo, hi, 10, 1e-12);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        inner, edges[a], edges[a + 1], 12, 1e-11);
  };
  std::vector<double> expected;
  double total = 0.0;
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      expected.push_back(cell(a, b));
      total += expected.back();
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  const std::size_t n = 100000;
  Rng rng = make_stream(34);
  std::vector<double> observed(bins * bins, 0.0);
  const auto bin_of = [&](double x) {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                    edges.begin()) - 1;
  };
  for (std::size_t s = 0; s < n; ++s) {
    const Vector beta = sample_beta(WeightMatrix(m), rng).beta;
    if (beta(0) >= edges.back() || beta(1) >= edges.back()) continue;
    observed[bins * bin_of(beta(0)) + bin_of(beta(1))] += 1.0;
  }
  for (double& e : expected) e *= static_cast<double>(n);
  const TestVerdict v = chi_square_gof(observed, expected);
  CHECK_MESSAGE(v.pass, v.notes);
}

TEST_CASE("elimination order does not change the law") {
  Rng rng = make_stream(35);
  const WeightMatrix w = loopy_graph();
  const IndexSet forward{0, 1, 2, 3};
  const IndexSet backward{3, 2, 1, 0};
  const auto a = draw(w, 20000, rng, std::span<const Index>(forward));
  const auto b = draw(w, 20000, rng, std::span<const Index>(backward));
  for (Index i = 0; i < 4; ++i) {
    CHECK(ks_two_sample(a[i], b[i]).pass);
    for (Index j = i + 1; j < 4; ++j) {
      CHECK(homogeneity_p_value(a[i], a[j], b[i], b[j]) > 0.01);
    }
  }
  const NuSample x = sample_beta(w, rng, std::span<const Index>(backward));
  CHECK(x.elimination_order == backward);
}

TEST_CASE("restriction of beta to I is the wired marginal") {
  Rng rng = make_stream(36);
  const WeightMatrix w = cycle4_graph().weight_matrix();
  const IndexSet j{0, 2};
  const WiredWeights wired = wire_weights(w, j, 0);
  const auto full = draw(w, 20000, rng);
  const auto small = draw(wired.weights, 20000, rng);
  for (std::size_t k = 0; k + 1 < wired.vertices.size(); ++k) {
    CHECK(ks_two_sample(full[wired.vertices[k]], small[k]).pass);
  }
}

TEST_CASE("conditional sampling") {
  Rng rng = make_stream(37);
  const WeightMatrix w = cycle4_graph().weight_matrix();
  const IndexSet j{0, 1, 2, 3};
  const BetaField all = conditional_sample(w, Vector(0), j, rng);
  CHECK(all.size() == 4);

  // Two-stage draw against the one-stage draw.
  const IndexSet jj{0, 1};
  const WiredWeights wired = wire_weights(w, jj, 0);
  std::vector<std::vector<double>> two_stage(4);
  const std::size_t n = 20000;
  for (std::size_t s = 0; s < n; ++s) {
    const Vector wired_beta = sample_beta(wired.weights, rng).beta;
    const Vector beta_i = wired_beta.head(2);
    const BetaField beta_j = conditional_sample(w, beta_i, jj, rng);
    two_stage[0].push_back(beta_j(0));
    two_stage[1].push_back(beta_j(1));
    two_stage[2].push_back(beta_i(0));
    two_stage[3].push_back(beta_i(1));
  }
  const auto one_stage = draw(w, n, rng);
  for (Index i = 0; i < 4; ++i) CHECK(ks_two_sample(two_stage[i], one_stage[i]).pass);

  // Conditional marginal for one fixed beta_I.
  Vector beta_i(2);
  beta_i << 1.1, 0.9;
  const WeightMatrix wj = effective_weights(w, beta_i, jj);
  for (Index k = 0; k < 2; ++k) {
    std::vector<double> g;
    for (std::size_t s = 0; s < n; ++s) {
      const BetaField b = conditional_sample(w, beta_i, jj, rng);
      g.push_back(1.0 / (2.0 * b(k) - wj(k, k)));
    }
    const IgParams p = IgParams::make(1.0 / wj.off_diagonal_sum(k), 1.0);
    CHECK(ks_one_sample(g, [&](double x) { return ig_cdf(x, p); }).pass);
  }
}

TEST_CASE("disconnected weights are rejected") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 1) = m(1, 0) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  Rng rng = make_stream(38);
  CHECK_THROWS(sample_beta(WeightMatrix(m), rng));
}
