#include "issfa/sampler/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace issfa::sampler {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::array<char, 6> kMagic = {'I', 'S', 'S', 'F', 'A', '1'};

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw std::runtime_error("checkpoint: truncated stream");
    }
    return value;
}

void put_doubles(std::ostream& out, const double* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::istream& in, double* data, std::size_t n) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) {
        throw std::runtime_error("checkpoint: truncated stream");
    }
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelState& state, std::uint64_t iteration) {
    state.check_invariants();
    const std::uint64_t t = state.observations();
    const std::uint64_t k = state.feature_count();
    const std::uint64_t v = k > 0 ? static_cast<std::uint64_t>(state.features.front().size()) : 0;
    const auto p = static_cast<std::uint64_t>(state.xi.size());

    out.write(kMagic.data(), kMagic.size());
    put<std::uint16_t>(out, kCheckpointVersion);
    for (std::uint64_t n : {t, v, k, p, iteration}) {
        put(out, n);
    }
    put(out, state.sigma2);
    put(out, state.alpha);
    put(out, state.beta);
    put_doubles(out, state.xi.data(), p);
    put_doubles(out, state.nu.data(), k);
    put_doubles(out, state.tau.data(), k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& column = state.z.column(j);
        out.write(reinterpret_cast<const char*>(column.data()), static_cast<std::streamsize>(t));
        put_doubles(out, state.weights[j].data(), t);
    }
    for (std::size_t j = 0; j < k; ++j) {
        put_doubles(out, state.features[j].data(), v);
    }
    if (!out) {
        throw std::runtime_error("checkpoint: write failed");
    }
}

void write_checkpoint(const std::filesystem::path& path, const ModelState& state, std::uint64_t iteration) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    }
    write_checkpoint(out, state, iteration);
}

Checkpoint read_checkpoint(std::istream& in) {
    std::array<char, 6> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw std::runtime_error("checkpoint: bad magic");
    }
    const auto version = get<std::uint16_t>(in);
    if (version != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto t = get<std::uint64_t>(in);
    const auto v = get<std::uint64_t>(in);
    const auto k = get<std::uint64_t>(in);
    const auto p = get<std::uint64_t>(in);
    Checkpoint cp;
    cp.iteration = get<std::uint64_t>(in);

    ModelState& s = cp.state;
    s.z = ibp::BinaryFeatureMatrix(t);
    s.sigma2 = get<double>(in);
    s.alpha = get<double>(in);
    s.beta = get<double>(in);
    s.xi = Vector(static_cast<Eigen::Index>(p));
    get_doubles(in, s.xi.data(), p);
    std::vector<double> nu(k);
    std::vector<double> tau(k);
    get_doubles(in, nu.data(), k);
    get_doubles(in, tau.data(), k);
    std::vector<std::uint8_t> column(t);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t col = s.append_feature(Vector::Zero(static_cast<Eigen::Index>(v)), nu[j], tau[j]);
        in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(t));
        if (!in) {
            throw std::runtime_error("checkpoint: truncated stream");
        }
        for (std::size_t row = 0; row < t; ++row) {
            if (column[row] > 1) {
                throw std::runtime_error("checkpoint: non-binary activation entry");
            }
            s.z.set(row, col, column[row] != 0);
        }
        get_doubles(in, s.weights[col].data(), t);
    }
    for (std::size_t j = 0; j < k; ++j) {
        get_doubles(in, s.features[j].data(), v);
    }
    s.check_invariants();
    return cp;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open " + path.string());
    }
    return read_checkpoint(in);
}

}  // namespace issfa::sampler
