#include "harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "core/error.hpp"

namespace rproc {

void Histogram::add(const IndexSet& key, std::uint64_t times) {
  counts[key] += times;
  total += times;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [key, c] : other.counts) counts[key] += c;
  total += other.total;
}

std::map<IndexSet, double> Histogram::frequencies() const {
  std::map<IndexSet, double> out;
  if (total == 0) return out;
  for (const auto& [key, c] : counts) {
    out.emplace(key, static_cast<double>(c) / static_cast<double>(total));
  }
  return out;
}

double total_variation(const std::map<IndexSet, double>& p,
                       const std::map<IndexSet, double>& q) {
  double sum = 0.0;
  for (const auto& [key, v] : p) {
    const auto it = q.find(key);
    sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, v] : q) {
    if (!p.contains(key)) sum += std::abs(v);
  }
  return 0.5 * sum;
}

namespace {

std::size_t common_key_length(const std::map<IndexSet, double>& p,
                              const std::map<IndexSet, double>& q) {
  std::set<std::size_t> lengths;
  for (const auto& entry : p) lengths.insert(entry.first.size());
  for (const auto& entry : q) lengths.insert(entry.first.size());
  require(lengths.size() <= 1, "histograms are keyed by sequences of different lengths");
  return lengths.empty() ? 0 : *lengths.begin();
}

std::size_t joint_support(const std::map<IndexSet, double>& p,
                          const std::map<IndexSet, double>& q) {
  std::size_t k = p.size();
  for (const auto& entry : q) {
    if (!p.contains(entry.first)) ++k;
  }
  return k;
}

}  // namespace

TestVerdict two_sample_tv(const Histogram& a, const Histogram& b) {
  require(a.total > 0 && b.total > 0, "empty histogram");
  const auto p = a.frequencies();
  const auto q = b.frequencies();
  const double k = static_cast<double>(joint_support(p, q));
  const double threshold =
      3.0 * (std::sqrt(k / static_cast<double>(a.total)) +
             std::sqrt(k / static_cast<double>(b.total)));
  return two_sample_tv(a, b, threshold);
}

TestVerdict two_sample_tv(const Histogram& a, const Histogram& b,
                          double threshold) {
  require(a.total > 0 && b.total > 0, "empty histogram");
  const auto p = a.frequencies();
  const auto q = b.frequencies();
  const std::size_t length = common_key_length(p, q);
  TestVerdict v;
  v.name = "two-sample TV";
  v.statistic = total_variation(p, q);
  v.threshold = threshold;
  v.pass = v.statistic <= threshold;
  v.n = std::min(a.total, b.total);
  v.notes = "support " + std::to_string(joint_support(p, q)) + ", key length " +
            std::to_string(length) + ", N_a " + std::to_string(a.total) +
            ", N_b " + std::to_string(b.total);
  return v;
}

TestVerdict tv_against_law(const Histogram& a, const std::map<IndexSet, double>& law,
                           double threshold) {
  require(a.total > 0, "empty histogram");
  const auto p = a.frequencies();
  common_key_length(p, law);
  TestVerdict v;
  v.name = "TV against exact law";
  v.statistic = total_variation(p, law);
  v.threshold = threshold;
  v.pass = v.statistic <= threshold;
  v.n = a.total;
  v.notes = "support " + std::to_string(joint_support(p, law));
  return v;
}

double kolmogorov_constant(double level) {
  require(level > 0.0 && level < 1.0, "significance level must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * level));
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.27) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestVerdict ks_one_sample(std::vector<double> sample,
                          const std::function<double(double)>& cdf,
                          double level) {
  require(!sample.empty(), "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f,
                  f - static_cast<double>(i) / n});
  }
  TestVerdict v;
  v.name = "one-sample KS";
  v.statistic = d;
  v.threshold = kolmogorov_constant(level) / std::sqrt(n);
  v.pass = d <= v.threshold;
  v.n = sample.size();
  v.notes = "p-value " + std::to_string(kolmogorov_survival(std::sqrt(n) * d));
  return v;
}

TestVerdict ks_two_sample(std::vector<double> a, std::vector<double> b,
                          double level) {
  require(!a.empty() && !b.empty(), "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double scale = std::sqrt((na + nb) / (na * nb));
  TestVerdict v;
  v.name = "two-sample KS";
  v.statistic = d;
  v.threshold = kolmogorov_constant(level) * scale;
  v.pass = d <= v.threshold;
  v.n = std::min(a.size(), b.size());
  v.notes = "p-value " + std::to_string(kolmogorov_survival(d / scale));
  return v;
}

TestVerdict chi_square_gof(const std::vector<double>& observed,
                           const std::vector<double>& expected, double level) {
  require(observed.size() == expected.size() && !observed.empty(),
          "observed and expected counts must have the same cells");
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  require(exp.size() >= 2, "too few cells with expected count >= 5");
  double stat = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    stat += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
  }
  const double df = static_cast<double>(exp.size() - 1);
  const boost::math::chi_squared dist(df);
  TestVerdict v;
  v.name = "chi-square";
  v.statistic = stat;
  v.threshold = boost::math::quantile(dist, 1.0 - level);
  v.pass = stat <= v.threshold;
  v.n = static_cast<std::uint64_t>(std::accumulate(obs.begin(), obs.end(), 0.0));
  v.notes = "cells " + std::to_string(exp.size()) + ", p-value " +
            std::to_string(boost::math::cdf(boost::math::complement(dist, stat)));
  return v;
}

TestVerdict mean_within_se(const std::string& name, double mean, double se,
                           double target, std::uint64_t n) {
  TestVerdict v;
  v.name = name;
  v.statistic = std::abs(mean - target);
  v.threshold = 4.0 * se;
  v.pass = v.statistic <= v.threshold;
  v.n = n;
  v.notes = "mean " + std::to_string(mean) + ", target " + std::to_string(target);
  return v;
}

namespace {

Matrix centered_distances(const std::vector<double>& x) {
  const auto n = static_cast<Index>(x.size());
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) = std::abs(x[i] - x[j]);
  }
  const Vector row = d.rowwise().mean();
  const double grand = row.mean();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) += grand - row(i) - row(j);
  }
  return d;
}

double dcov2(const Matrix& a, const Matrix& b, const std::vector<Index>& perm) {
  const Index n = a.rows();
  double s = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) s += a(i, j) * b(perm[i], perm[j]);
  }
  return s / static_cast<double>(n * n);
}

}  // namespace

double distance_correlation(const std::vector<double>& x,
                            const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "need paired samples");
  const Matrix a = centered_distances(x);
  const Matrix b = centered_distances(y);
  std::vector<Index> id(x.size());
  std::iota(id.begin(), id.end(), Index{0});
  const double vx = dcov2(a, a, id);
  const double vy = dcov2(b, b, id);
  if (!(vx > 0.0 && vy > 0.0)) return 0.0;
  return std::sqrt(std::max(0.0, dcov2(a, b, id)) / std::sqrt(vx * vy));
}

TestVerdict dcor_independence(const std::vector<double>& x,
                              const std::vector<double>& y, Rng& rng,
                              unsigned permutations, double level) {
  require(x.size() == y.size() && x.size() >= 2, "need paired samples");
  const Matrix a = centered_distances(x);
  const Matrix b = centered_distances(y);
  std::vector<Index> perm(x.size());
  std::iota(perm.begin(), perm.end(), Index{0});
  const double observed = dcov2(a, b, perm);
  unsigned at_least = 0;
  for (unsigned p = 0; p < permutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (dcov2(a, b, perm) >= observed) ++at_least;
  }
  const double p_value = (1.0 + at_least) / (1.0 + permutations);
  TestVerdict v;
  v.name = "distance-correlation permutation";
  v.statistic = p_value;
  v.threshold = level;
  v.pass = p_value > level;
  v.n = x.size();
  v.notes = "dcor " + std::to_string(distance_correlation(x, y)) + ", " +
            std::to_string(permutations) + " permutations";
  return v;
}

}  // namespace rproc
