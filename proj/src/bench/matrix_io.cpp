#include "issfa/bench/matrix_io.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace issfa::bench {

namespace {

static_assert(std::endian::native == std::endian::little, "matrix I/O assumes a little-endian host");

constexpr std::array<char, 5> kMagic = {'I', 'S', 'M', 'X', '1'};

std::runtime_error io_error(const std::filesystem::path& path, const std::string& what) {
    return std::runtime_error(path.string() + ": " + what);
}

}  // namespace

RowMatrix ArrayFile::matrix() const {
    if (dims.size() != 2) {
        throw std::runtime_error("array has rank " + std::to_string(dims.size()) + ", expected 2");
    }
    RowMatrix m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    std::copy(values.begin(), values.end(), m.data());
    return m;
}

void write_array(const std::filesystem::path& path, const std::vector<std::uint64_t>& dims, const double* values,
                 const Provenance& provenance) {
    std::uint64_t count = 1;
    for (std::uint64_t d : dims) {
        count *= d;
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw io_error(path, "cannot open for writing");
        }
        out.write(kMagic.data(), kMagic.size());
        const auto rank = static_cast<std::uint32_t>(dims.size());
        out.write(reinterpret_cast<const char*>(&rank), sizeof rank);
        out.write(reinterpret_cast<const char*>(dims.data()), static_cast<std::streamsize>(dims.size() * 8));
        out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(count * sizeof(double)));
        if (!out) {
            throw io_error(path, "write failed");
        }
    }
    nlohmann::json sidecar = {{"format", "ISMX1"},
                              {"shape", dims},
                              {"dtype", "float64"},
                              {"byte_order", "little"},
                              {"layout", "row-major"},
                              {"seed", provenance.seed},
                              {"provenance", provenance.description}};
    std::filesystem::path side = path;
    side += ".json";
    std::ofstream out(side, std::ios::trunc);
    if (!out) {
        throw io_error(side, "cannot open for writing");
    }
    out << sidecar.dump(2) << '\n';
}

void write_matrix(const std::filesystem::path& path, const RowMatrix& m, const Provenance& provenance) {
    write_array(path, {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())}, m.data(),
                provenance);
}

ArrayFile read_array(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error(path, "cannot open");
    }
    std::array<char, 5> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw io_error(path, "not an ISMX1 file");
    }
    std::uint32_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), sizeof rank);
    if (!in || rank > 8) {
        throw io_error(path, "bad rank");
    }
    ArrayFile file;
    file.dims.resize(rank);
    in.read(reinterpret_cast<char*>(file.dims.data()), static_cast<std::streamsize>(rank * 8));
    std::uint64_t count = 1;
    for (std::uint64_t d : file.dims) {
        count *= d;
    }
    file.values.resize(count);
    in.read(reinterpret_cast<char*>(file.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) {
        throw io_error(path, "truncated data");
    }
    return file;
}

RowMatrix read_matrix(const std::filesystem::path& path) {
    try {
        return read_array(path).matrix();
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.rfind(path.string(), 0) == 0) {
            throw;
        }
        throw io_error(path, what);
    }
}

void write_pgm(const std::filesystem::path& path, const Vector& pixels, std::size_t height, std::size_t width) {
    if (static_cast<std::size_t>(pixels.size()) != height * width) {
        throw std::invalid_argument("write_pgm: pixel count does not match height*width");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error(path, "cannot open for writing");
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    const double lo = pixels.size() ? pixels.minCoeff() : 0.0;
    const double hi = pixels.size() ? pixels.maxCoeff() : 0.0;
    const double span = hi - lo;
    for (Eigen::Index i = 0; i < pixels.size(); ++i) {
        const double scaled = span > 0.0 ? (pixels[i] - lo) / span * 255.0 : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled))));
    }
    if (!out) {
        throw io_error(path, "write failed");
    }
}

}  // namespace issfa::bench
