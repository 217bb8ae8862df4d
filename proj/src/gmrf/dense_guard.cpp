#include "issfa/gmrf/dense_guard.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace issfa::gmrf::dense_guard {

namespace {
std::atomic<std::size_t> g_peak{0};
}

void record(std::size_t dimension) {
    if (dimension > kMaxDenseDimension) {
        throw std::length_error("dense factor of dimension " + std::to_string(dimension) +
                                " exceeds the dense-size guard (" +
                                std::to_string(kMaxDenseDimension) + ")");
    }
    std::size_t prev = g_peak.load();
    while (prev < dimension && !g_peak.compare_exchange_weak(prev, dimension)) {
    }
}

std::size_t peak() { return g_peak.load(); }

void reset() { g_peak.store(0); }

}  // namespace issfa::gmrf::dense_guard
