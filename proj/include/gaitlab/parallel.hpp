#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace gaitlab {

/// How batch kernels distribute independent work items. kSerial is the
/// reference path the tests compare the OpenMP path against.
enum class Execution { kSerial, kParallel };

bool openmp_enabled();
int max_threads();

/// No-op without OpenMP.
void set_max_threads(int n);

/// Calls f(i) for i in [0, n). Under kParallel the iterations run in an
/// OpenMP loop; the exception of the lowest failing index is rethrown after
/// all iterations finish, so error reporting does not depend on scheduling.
template <class F>
void for_each_index(std::size_t n, Execution ex, F&& f) {
  if (ex == Execution::kSerial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gaitlab
