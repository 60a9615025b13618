#include "core/beta_sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "core/error.hpp"
#include "core/inv_gauss.hpp"

namespace rproc {

double nu_log_density(const WeightMatrix& w, const BetaField& beta) {
  const Matrix h = h_matrix(w, beta);
  const auto llt = factor_positive_definite(h);
  if (!llt) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(w.size());
  const double log_det = 2.0 * llt->matrixLLT().diagonal().array().log().sum();
  return 0.5 * n * std::log(2.0 / std::numbers::pi) - 0.5 * h.sum() -
         0.5 * log_det;
}

double nu_density(const WeightMatrix& w, const BetaField& beta) {
  return std::exp(nu_log_density(w, beta));
}

NuSample sample_beta(const WeightMatrix& w, Rng& rng,
                     std::optional<std::span<const Index>> order) {
  const Index n = w.size();
  require(n >= 1, "cannot sample beta on an empty vertex set");
  IndexSet fixed_order;
  if (order) {
    require(static_cast<Index>(order->size()) == n,
            "elimination order must list every vertex once");
    fixed_order = sorted_unique(*order, n);
    fixed_order.assign(order->begin(), order->end());
  }

  Matrix v = w.matrix();
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  NuSample out{BetaField::Zero(n), w, {}};
  out.elimination_order.reserve(static_cast<std::size_t>(n));

  const auto reduced_degree = [&](Index i) {
    double s = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k != i && active[static_cast<std::size_t>(k)]) s += v(i, k);
    }
    return s;
  };

  for (Index step = 0; step < n; ++step) {
    Index i = -1;
    double degree = 0.0;
    if (order) {
      i = fixed_order[static_cast<std::size_t>(step)];
      degree = reduced_degree(i);
    } else {
      for (Index k = 0; k < n; ++k) {
        if (!active[static_cast<std::size_t>(k)]) continue;
        const double d = reduced_degree(k);
        if (i < 0 || d > degree) {
          i = k;
          degree = d;
        }
      }
    }
    const bool last = step == n - 1;
    if (!last && !(degree > 0.0)) {
      fail(ErrorCode::kInvalidArgument,
           "vertex " + std::to_string(i) +
               " is isolated from the remaining vertices; nu^W needs a "
               "connected weight graph");
    }
    const double mu = last ? std::numeric_limits<double>::infinity() : 1.0 / degree;
    const double g = ig_sample(IgParams{mu, 1.0}, rng);
    const double h = 1.0 / g;
    out.beta(i) = 0.5 * (h + v(i, i));
    out.elimination_order.push_back(i);
    active[static_cast<std::size_t>(i)] = false;
    if (last) break;
    for (Index a = 0; a < n; ++a) {
      if (!active[static_cast<std::size_t>(a)] || v(a, i) == 0.0) continue;
      const double scaled = v(a, i) / h;
      for (Index b = 0; b < n; ++b) {
        if (active[static_cast<std::size_t>(b)]) v(a, b) += scaled * v(i, b);
      }
    }
  }
  return out;
}

BetaField conditional_sample(const WeightMatrix& w, const Vector& beta_i,
                             std::span<const Index> j, Rng& rng) {
  const WeightMatrix reduced = effective_weights(w, beta_i, j);
  return sample_beta(reduced, rng).beta;
}

}  // namespace rproc
