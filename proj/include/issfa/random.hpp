#pragma once

#include <cstdint>
#include <random>

namespace issfa {

/// SplitMix64 finaliser; used to derive independent substream seeds from a
/// root seed and a purpose key.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t root, std::uint64_t key);

/// Seedable random source shared by every stochastic operation.
///
/// All draws go through this class so that a (seed, call sequence) pair
/// determines every output bit. Distributions that cache state (the standard
/// normal) live inside the object, so copies are independent replicas.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    [[nodiscard]] Rng substream(std::uint64_t key) const;

    double uniform();
    double normal();
    double normal(double mean, double sd);
    /// Shape/rate parameterisation.
    double gamma(double shape, double rate);
    /// Shape/scale parameterisation: X ~ IG(shape, scale) iff 1/X ~ G(shape, rate=scale).
    double inverse_gamma(double shape, double scale);
    /// Inversion for means below 30, the standard library otherwise.
    int poisson(double mean);
    bool bernoulli(double p);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Substream keys used by the sampler and the harness. Fixed values: changing
/// one changes every downstream draw.
namespace stream {
inline constexpr std::uint64_t kSimulate = 0x51u;
inline constexpr std::uint64_t kInitialise = 0x1417u;
inline constexpr std::uint64_t kSampler = 0x5a3u;
inline constexpr std::uint64_t kHeldout = 0x401du;
}  // namespace stream

}  // namespace issfa
