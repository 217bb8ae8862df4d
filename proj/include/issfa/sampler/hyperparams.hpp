#pragma once

#include <cstddef>

#include "issfa/types.hpp"

namespace issfa::sampler {

/// Prior hyperparameters. Gamma priors use shape/rate, the noise prior is
/// IG(shape, scale).
struct Hyperparams {
    double noise_shape = 1.0;  // a
    double noise_scale = 1.0;  // b
    double alpha_shape = 1.0;
    double alpha_rate = 1.0;
    double beta_shape = 1.0;
    double beta_rate = 1.0;
    double beta_step = 0.5;  // std dev of the random walk on ln β
    double nu_shape = 1.0;
    double nu_rate = 1.0;
    double tau_mean = 0.0;
    double tau_precision = 1.0;
    Vector xi_mean = Vector::Zero(2);        // prior means of ξ_p = ln θ_p
    Vector xi_precision = Vector::Constant(2, 0.01);
    int max_new_features = 10;  // cap on n in the unique-feature proposal
    bool theta_mh = false;      // MH-correct the Laplace proposal for ξ

    /// Throws std::invalid_argument naming the first offending field.
    void validate(std::size_t parameter_count) const;
};

}  // namespace issfa::sampler
