#include "core/inv_gauss.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core/error.hpp"

namespace rproc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE1Switch = 1.5;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// Continued fraction for e^x E_1(x), modified Lentz.
double e1_scaled_fraction(double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

IgParams IgParams::make(double mu, double lambda) {
  require(mu > 0.0 && !std::isnan(mu), "IG mean must be positive");
  require(lambda > 0.0 && std::isfinite(lambda), "IG shape must be positive");
  return {mu, lambda};
}

double ig_density(double x, IgParams p) {
  require(x > 0.0, "IG density needs x > 0");
  const double log_base =
      0.5 * (std::log(p.lambda / (2.0 * std::numbers::pi)) - 3.0 * std::log(x));
  if (std::isinf(p.mu)) return std::exp(log_base - p.lambda / (2.0 * x));
  const double dev = x - p.mu;
  return std::exp(log_base - p.lambda * dev * dev / (2.0 * p.mu * p.mu * x));
}

double ig_cdf(double x, IgParams p) {
  if (x <= 0.0) return 0.0;
  const double s = std::sqrt(p.lambda / x);
  if (std::isinf(p.mu)) return 2.0 * std_normal_cdf(-s);
  const double first = std_normal_cdf(s * (x / p.mu - 1.0));
  // e^{2 lambda/mu} Phi(-s (x/mu + 1)) evaluated in log space.
  const double tail = std_normal_cdf(-s * (x / p.mu + 1.0));
  const double second =
      tail > 0.0 ? std::exp(2.0 * p.lambda / p.mu + std::log(tail)) : 0.0;
  return std::min(1.0, first + second);
}

double ig_sample(IgParams p, Rng& rng) {
  const double z = std_normal(rng);
  const double y = z * z;
  if (std::isinf(p.mu)) return p.lambda / y;
  // Smaller root of the quadratic, x1 = mu / (1 + t + sqrt(t^2 + 2t)) with
  // t = mu y / (2 lambda); this form has no cancellation.
  const double t = p.mu * y / (2.0 * p.lambda);
  double x1;
  if (std::isinf(t)) {
    x1 = p.lambda / y;
  } else {
    const double root = t > 1.0 ? t * std::sqrt(1.0 + 2.0 / t) : std::sqrt(t * t + 2.0 * t);
    x1 = p.mu / (1.0 + t + root);
  }
  const double u = uniform01(rng);
  if (u * (p.mu + x1) <= p.mu) return x1;
  return p.mu * (p.mu / x1);
}

double ig_laplace(double t, IgParams p) {
  const double limit = p.lambda / (2.0 * p.mu * p.mu);
  require(t <= limit, "Laplace transform argument above lambda / (2 mu^2)",
          ErrorCode::kOutOfRange);
  const double inner = std::max(0.0, 1.0 - 2.0 * p.mu * p.mu * t / p.lambda);
  return std::exp(p.lambda / p.mu * (1.0 - std::sqrt(inner)));
}

double frac_moment(double w, double alpha) {
  require(w > 0.0 && std::isfinite(w), "frac_moment needs W > 0");
  require(alpha >= 0.0 && alpha <= 1.0, "frac_moment needs alpha in [0, 1]",
          ErrorCode::kOutOfRange);
  if (alpha == 0.0) return 1.0;
  // With x = e^s the integrand (2 pi)^{-1/2} x^{alpha-3/2} e^{-(Wx-1)^2/(2x)} dx
  // becomes smooth in s. Its bulk sits on [0, -2 log W] for small W, and it
  // is negligible below s = -8 and above log(1600 / W^2).
  const auto integrand = [w, alpha](double s) {
    const double x = std::exp(s);
    const double dev = w * x - 1.0;
    return std::exp((alpha - 0.5) * s - dev * dev / (2.0 * x));
  };
  const double lo = -8.0;
  const double hi = std::log(1600.0) - 2.0 * std::log(w);
  const double peak = -std::log(w);
  double cuts[] = {lo, std::min(0.0, peak), std::max(0.0, peak), hi};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[k], cuts[k + 1], 20, 1e-13);
  }
  return total / std::sqrt(2.0 * std::numbers::pi);
}

double exp_integral_e1(double x) {
  require(x > 0.0, "E1 needs x > 0");
  if (x < kE1Switch) return e1_series(x);
  return e1_scaled_fraction(x) * std::exp(-x);
}

double scaled_exp_integral_e1(double x) {
  require(x > 0.0, "E1 needs x > 0");
  if (x < kE1Switch) return std::exp(x) * e1_series(x);
  return e1_scaled_fraction(x);
}

double log_moment(double w) {
  require(w > 0.0 && std::isfinite(w), "log_moment needs W > 0");
  return -std::log(w) - scaled_exp_integral_e1(2.0 * w);
}

double c_alpha(double alpha) {
  require(alpha >= 0.0 && alpha < 0.5, "C_alpha needs alpha in [0, 1/2)",
          ErrorCode::kOutOfRange);
  return std::pow(2.0, -alpha) * std::tgamma(0.5 - alpha) /
         std::sqrt(std::numbers::pi);
}

}  // namespace rproc
