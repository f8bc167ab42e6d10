#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace specpart {

/// Worker count used by the library (default 1). Results never depend on it.
void set_threads(int n);
int threads() noexcept;

/// Runs f(0..n-1), spread over threads(). If several calls throw, the
/// exception of the lowest index is rethrown, so failures are reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace specpart
