#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "issfa/sampler/model_state.hpp"

namespace issfa::sampler {

/**
 * Binary checkpoint of a ModelState plus the sweep counter.
 *
 * Layout (all little-endian):
 *   "ISSFA1"            6 bytes magic
 *   u16 version         currently 1
 *   u64 T, V, K, P, iteration
 *   f64 sigma2, alpha, beta
 *   f64 xi[P], nu[K], tau[K]
 *   per column k: u8 Z[T], f64 A[T]   (A is zero where Z is 0)
 *   per column k: f64 S_k[V]
 *
 * Round trips are bit-exact.
 */
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelState state;
    std::uint64_t iteration = 0;
};

void write_checkpoint(std::ostream& out, const ModelState& state, std::uint64_t iteration);
void write_checkpoint(const std::filesystem::path& path, const ModelState& state, std::uint64_t iteration);

/// Throws std::runtime_error on a bad magic, version or truncated stream.
[[nodiscard]] Checkpoint read_checkpoint(std::istream& in);
[[nodiscard]] Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace issfa::sampler
