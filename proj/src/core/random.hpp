#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rproc {

using Rng = std::mt19937_64;

// Independent stream `stream` derived from a master seed. Workers that need
// their own randomness take consecutive stream ids, so results do not depend
// on how work is scheduled.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

// Uniform on the open interval (0, 1).
inline double uniform01(Rng& rng) {
  for (;;) {
    const double u = std::generate_canonical<double, 53>(rng);
    if (u > 0.0) return u;
  }
}

inline double std_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Rng& rng, double rate) {
  return -std::log(uniform01(rng)) / rate;
}

inline double gamma_variate(Rng& rng, double shape, double scale = 1.0) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

}  // namespace rproc
