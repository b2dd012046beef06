#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace thetaforge::detail {

// OpenMP loop over [0, count) that rethrows the exception of the lowest
// failing index after the loop, so failures are reported deterministically.
template <class Body>
void parallel_for(std::size_t count, Body&& body, int chunk = 1) {
  std::vector<std::exception_ptr> errors(count);
  bool failed = false;
#pragma omp parallel for schedule(dynamic, chunk) reduction(|| : failed)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
      failed = true;
    }
  }
  if (!failed) return;
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace thetaforge::detail
