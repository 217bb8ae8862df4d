#pragma once

#include <cstddef>

namespace issfa::gmrf::dense_guard {

/// Largest square dense factor the library will build. Transforms whose axes
/// exceed the fast-path threshold never reach this limit.
inline constexpr std::size_t kMaxDenseDimension = 512;

/// Every square dense allocation inside the library is announced here first.
/// Throws std::length_error above kMaxDenseDimension.
void record(std::size_t dimension);

/// Audit hook: largest dimension recorded since the last reset.
[[nodiscard]] std::size_t peak();
void reset();

}  // namespace issfa::gmrf::dense_guard
