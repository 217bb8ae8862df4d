#include "issfa/random.hpp"

#include <cmath>
#include <stdexcept>

namespace issfa {

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t key) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (key + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed, 0)) {}

Rng Rng::substream(std::uint64_t key) const { return Rng(mix_seed(seed_, key)); }

double Rng::uniform() {
    // (0, 1]: safe to take the logarithm of.
    return 1.0 - uniform_(engine_);
}

double Rng::normal() { return normal_(engine_); }

double Rng::normal(double mean, double sd) { return mean + sd * normal_(engine_); }

double Rng::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
    }
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(engine_);
}

double Rng::inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

int Rng::poisson(double mean) {
    if (mean < 0.0) {
        throw std::invalid_argument("Rng::poisson: negative mean");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean >= 30.0) {
        std::poisson_distribution<int> dist(mean);
        return dist(engine_);
    }
    const double u = uniform_(engine_);
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / k;
        cdf += p;
    }
    return k;
}

bool Rng::bernoulli(double p) { return uniform_(engine_) < p; }

}  // namespace issfa
