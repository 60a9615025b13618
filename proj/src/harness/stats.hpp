#pragma once

// Statistical tests used by the verification suites. Every threshold is a
// closed-form function of the sample sizes and support size.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/random.hpp"
#include "core/weights.hpp"

namespace rproc {

struct TestVerdict {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t n = 0;
  std::string notes;
};

// Counts keyed by exact vertex sequences.
struct Histogram {
  std::map<IndexSet, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const IndexSet& key, std::uint64_t times = 1);
  void merge(const Histogram& other);
  std::map<IndexSet, double> frequencies() const;
};

double total_variation(const std::map<IndexSet, double>& p,
                       const std::map<IndexSet, double>& q);

// TV = 1/2 sum |p - q|; passes iff TV <= 3 (sqrt(K / N_a) + sqrt(K / N_b))
// with K the size of the joint support. All keys must have one length.
TestVerdict two_sample_tv(const Histogram& a, const Histogram& b);

// Same statistic with a caller-fixed threshold (recorded in the verdict).
TestVerdict two_sample_tv(const Histogram& a, const Histogram& b,
                          double threshold);

// TV between an empirical histogram and an exact law.
TestVerdict tv_against_law(const Histogram& a, const std::map<IndexSet, double>& law,
                           double threshold);

// Asymptotic Kolmogorov critical constant c(level) = sqrt(-log(level / 2) / 2).
double kolmogorov_constant(double level);
// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

TestVerdict ks_one_sample(std::vector<double> sample,
                          const std::function<double(double)>& cdf,
                          double level = 0.01);
TestVerdict ks_two_sample(std::vector<double> a, std::vector<double> b,
                          double level = 0.01);

// Pearson chi-square goodness of fit; cells with expected count below 5 are
// pooled into their neighbor.
TestVerdict chi_square_gof(const std::vector<double>& observed,
                           const std::vector<double>& expected,
                           double level = 0.01);

// Passes iff |mean - target| <= 4 standard errors.
TestVerdict mean_within_se(const std::string& name, double mean, double se,
                           double target, std::uint64_t n);

double distance_correlation(const std::vector<double>& x,
                            const std::vector<double>& y);
// Permutation test of independence; passes iff the permutation p-value
// exceeds `level`.
TestVerdict dcor_independence(const std::vector<double>& x,
                              const std::vector<double>& y, Rng& rng,
                              unsigned permutations = 199,
                              double level = 0.01);

}  // namespace rproc
