#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "issfa/types.hpp"

namespace issfa::bench {

/**
 * Dense array file: "ISMX1" magic, u32 rank, u64 dims[rank], then the
 * entries as row-major little-endian f64. Each file has a JSON sidecar
 * (<file>.json) recording shape, dtype, seed and a free-form provenance
 * string.
 */
struct ArrayFile {
    std::vector<std::uint64_t> dims;
    std::vector<double> values;

    /// Rank-2 view; throws std::runtime_error for other ranks.
    [[nodiscard]] RowMatrix matrix() const;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string description;
};

void write_array(const std::filesystem::path& path, const std::vector<std::uint64_t>& dims, const double* values,
                 const Provenance& provenance);
void write_matrix(const std::filesystem::path& path, const RowMatrix& m, const Provenance& provenance);

/// Throws std::runtime_error naming the file on I/O or format errors.
[[nodiscard]] ArrayFile read_array(const std::filesystem::path& path);
[[nodiscard]] RowMatrix read_matrix(const std::filesystem::path& path);

/// 8-bit binary PGM of a height×width image, min–max scaled to 0..255
/// (a constant image maps to 0).
void write_pgm(const std::filesystem::path& path, const Vector& pixels, std::size_t height, std::size_t width);

}  // namespace issfa::bench
