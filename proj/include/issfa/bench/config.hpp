#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "issfa/sampler/hyperparams.hpp"
#include "issfa/sampler/initialise.hpp"

namespace issfa::bench {

/// Simulation recipe. Weight means and variances are drawn per feature,
/// uniformly from the given ranges.
struct SimConfig {
    std::vector<std::size_t> grid = {32, 32};
    std::size_t observations = 400;  // T
    std::size_t holdout = 100;       // holdout rows
    std::size_t features = 8;        // K_true
    double activation_prob = 0.15;
    double theta1 = 1.0;
    double theta2 = 100.0;
    double weight_mean_min = 1.0;
    double weight_mean_max = 1.0;
    double weight_var_min = 0.5;
    double weight_var_max = 1.0;
    double noise_variance = 1.0;
    std::uint64_t seed = 1;

    [[nodiscard]] std::size_t dimension() const;
    void validate() const;
};

/// Sampler schedule and harness output options.
struct RunConfig {
    std::size_t sweeps = 2000;
    std::size_t thin = 10;
    std::uint64_t seed = 7;
    std::size_t residual_refresh = 50;
    sampler::InitOptions init;
    std::size_t heldout_sweeps = 10;
    double burn_in_fraction = 0.5;   // samples after this fraction enter posterior means
    std::size_t checkpoint_every = 500;  // 0 disables intermediate checkpoints
    std::size_t svd_rank = 0;        // 0: use the true K from the dataset
    bool record_wall_time = true;
    bool write_samples = true;       // one S matrix file per thinned sample
    bool write_pgm = true;

    void validate() const;
};

struct ExperimentConfig {
    SimConfig sim;
    sampler::Hyperparams prior;
    RunConfig run;
};

/**
 * INI-style configuration with sections [sim], [prior] and [sampler].
 *
 * Every key has a default (the member initialisers above and in
 * Hyperparams); a missing file section leaves its defaults untouched.
 * Unknown sections or keys and unparseable values throw
 * std::invalid_argument naming "section.key".
 */
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Serialises every key, so parse_config(format_config(c)) reproduces c.
[[nodiscard]] std::string format_config(const ExperimentConfig& config);

/// "32x32" → {32, 32}.
[[nodiscard]] std::vector<std::size_t> parse_grid(const std::string& text);
[[nodiscard]] std::string format_grid(const std::vector<std::size_t>& grid);

}  // namespace issfa::bench
