#include "issfa/sampler/hyperparams.hpp"

#include <stdexcept>
#include <string>

namespace issfa::sampler {

namespace {
void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw std::invalid_argument(std::string("Hyperparams: ") + name + " must be positive");
    }
}
}  // namespace

void Hyperparams::validate(std::size_t parameter_count) const {
    require_positive(noise_shape, "noise_shape");
    require_positive(noise_scale, "noise_scale");
    require_positive(alpha_shape, "alpha_shape");
    require_positive(alpha_rate, "alpha_rate");
    require_positive(beta_shape, "beta_shape");
    require_positive(beta_rate, "beta_rate");
    require_positive(beta_step, "beta_step");
    require_positive(nu_shape, "nu_shape");
    require_positive(nu_rate, "nu_rate");
    require_positive(tau_precision, "tau_precision");
    if (static_cast<std::size_t>(xi_mean.size()) != parameter_count ||
        static_cast<std::size_t>(xi_precision.size()) != parameter_count) {
        throw std::invalid_argument("Hyperparams: xi_mean/xi_precision need " + std::to_string(parameter_count) +
                                    " entries");
    }
    if (!(xi_precision.array() > 0.0).all()) {
        throw std::invalid_argument("Hyperparams: xi_precision must be positive");
    }
    if (max_new_features < 0) {
        throw std::invalid_argument("Hyperparams: max_new_features must be nonnegative");
    }
}

}  // namespace issfa::sampler
