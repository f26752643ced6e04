// Copyright 2026 The Stubforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stubforge {

/// Selects the OpenMP kernel or the serial reference loop. The serial path
/// is kept so tests can check that both produce identical results.
enum class Execution { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Exceptions thrown by fn are collected and the
/// one with the lowest index is rethrown after the loop, on either path.
template <typename Fn>
void parallel_for(std::size_t n, Execution exec, Fn&& fn, int threads = 0) {
  std::vector<std::exception_ptr> errors(n);
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
#ifdef _OPENMP
    int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
#else
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
#endif
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace stubforge
