#pragma once

#include "core/error.hpp"

namespace rproc {

template <class Stepper, class Step>
IndexSet restricted_loop_free_prefix(Stepper& stepper, Step&& step,
                                     const std::vector<bool>& in_j, unsigned k,
                                     std::size_t max_steps) {
  IndexSet out{stepper.position()};
  require(in_j[static_cast<std::size_t>(out.front())],
          "walk must start inside J");
  for (std::size_t n = 0; out.size() < k + 1; ++n) {
    if (n == max_steps) {
      fail(ErrorCode::kNumerical, "walk did not return to J often enough");
    }
    step(stepper);
    const Index v = stepper.position();
    if (in_j[static_cast<std::size_t>(v)] && v != out.back()) out.push_back(v);
  }
  return out;
}

}  // namespace rproc
