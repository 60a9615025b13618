#pragma once

// Inverse Gaussian distribution IG(mu, lambda) and the moment formulas for
// X_W ~ IG(1/W, 1) that control the renormalization flow.

#include <limits>

#include "core/random.hpp"

namespace rproc {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kLog2 = 0.69314718055994530942;
// gamma + log 2
inline constexpr double kC2 = 1.27036284546147817002;

struct IgParams {
  double mu = 1.0;      // mean; +infinity gives the Levy limit lambda / Z^2
  double lambda = 1.0;  // shape

  // Throws unless mu > 0 and lambda > 0.
  static IgParams make(double mu, double lambda);
};

double ig_density(double x, IgParams p);
double ig_cdf(double x, IgParams p);

// Exact draw: Michael-Schucany-Haas transform of a chi-square(1) variate with
// one uniform to choose between the two roots. Stable for very large mu.
double ig_sample(IgParams p, Rng& rng);

// E[e^{tX}] for t <= lambda / (2 mu^2).
double ig_laplace(double t, IgParams p);

// E[X_W^alpha] for X_W ~ IG(1/W, 1), alpha in [0, 1], by adaptive quadrature.
double frac_moment(double w, double alpha);

// E[log X_W] = -log W - e^{2W} E_1(2W).
double log_moment(double w);

double exp_integral_e1(double x);
// e^x E_1(x), without overflow for large x.
double scaled_exp_integral_e1(double x);

// C_alpha = 2^{-alpha} Gamma(1/2 - alpha) / sqrt(pi), alpha in [0, 1/2).
double c_alpha(double alpha);

}  // namespace rproc
