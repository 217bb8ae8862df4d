#include "issfa/bench/simulate.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "issfa/bench/matrix_io.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/gmrf/spectral_precision.hpp"

namespace issfa::bench {

Dataset simulate(const SimConfig& config, Rng& rng) {
    config.validate();
    const auto transform = std::make_shared<const gmrf::OrthoTransform>(gmrf::OrthoTransform::dct(config.grid));
    const gmrf::SpectralPrecision prec(transform, gmrf::SpectralCurve::affine(gmrf::grid_laplacian_eigenvalues(config.grid)),
                                       (Vector(2) << config.theta1, config.theta2).finished());
    const auto k = static_cast<Eigen::Index>(config.features);
    const auto v = static_cast<Eigen::Index>(config.dimension());
    const auto total = static_cast<Eigen::Index>(config.observations + config.holdout);

    GroundTruth truth;
    truth.features = RowMatrix(k, v);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Vector s = prec.sample(rng);
        truth.features.row(j) = s.transpose() / s.norm();
    }
    std::vector<double> mean(config.features);
    std::vector<double> sd(config.features);
    for (std::size_t j = 0; j < config.features; ++j) {
        mean[j] = config.weight_mean_min + (config.weight_mean_max - config.weight_mean_min) * rng.uniform();
        sd[j] = std::sqrt(config.weight_var_min + (config.weight_var_max - config.weight_var_min) * rng.uniform());
    }
    RowMatrix w = RowMatrix::Zero(total, k);
    for (Eigen::Index t = 0; t < total; ++t) {
        for (Eigen::Index j = 0; j < k; ++j) {
            if (rng.bernoulli(config.activation_prob)) {
                w(t, j) = rng.normal(mean[static_cast<std::size_t>(j)], sd[static_cast<std::size_t>(j)]);
            }
        }
    }
    const RowMatrix x = w * truth.features;
    RowMatrix y = x;
    const double noise_sd = std::sqrt(config.noise_variance);
    for (Eigen::Index t = 0; t < total; ++t) {
        for (Eigen::Index i = 0; i < v; ++i) {
            y(t, i) += noise_sd * rng.normal();
        }
    }

    const auto train = static_cast<Eigen::Index>(config.observations);
    const auto hold = static_cast<Eigen::Index>(config.holdout);
    truth.weights = w.topRows(train);
    truth.holdout_weights = w.bottomRows(hold);
    truth.latent = x.topRows(train);
    truth.holdout_latent = x.bottomRows(hold);

    Dataset data;
    data.grid = config.grid;
    data.y = y.topRows(train);
    data.y_holdout = y.bottomRows(hold);
    data.truth = std::move(truth);
    data.seed = config.seed;
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const Provenance prov{data.seed, "simulated dataset, grid " + format_grid(data.grid)};
    write_matrix(dir / "Y.ismx", data.y, prov);
    write_matrix(dir / "Y_holdout.ismx", data.y_holdout, prov);
    if (data.truth) {
        write_matrix(dir / "S_true.ismx", data.truth->features, prov);
        write_matrix(dir / "W_true.ismx", data.truth->weights, prov);
        write_matrix(dir / "W_holdout_true.ismx", data.truth->holdout_weights, prov);
        write_matrix(dir / "X_true.ismx", data.truth->latent, prov);
        write_matrix(dir / "X_holdout_true.ismx", data.truth->holdout_latent, prov);
    }
    const nlohmann::json meta = {{"grid", data.grid},
                                 {"observations", data.y.rows()},
                                 {"holdout", data.y_holdout.rows()},
                                 {"dimension", data.y.cols()},
                                 {"has_truth", data.truth.has_value()},
                                 {"seed", data.seed}};
    std::ofstream out(dir / "dataset.json", std::ios::trunc);
    if (!out) {
        throw std::runtime_error((dir / "dataset.json").string() + ": cannot open for writing");
    }
    out << meta.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const std::filesystem::path meta_path = dir / "dataset.json";
    std::ifstream in(meta_path);
    if (!in) {
        throw std::runtime_error(meta_path.string() + ": cannot open");
    }
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(meta_path.string() + ": " + e.what());
    }
    Dataset data;
    data.grid = meta.at("grid").get<std::vector<std::size_t>>();
    data.seed = meta.value("seed", std::uint64_t{0});
    data.y = read_matrix(dir / "Y.ismx");
    data.y_holdout = read_matrix(dir / "Y_holdout.ismx");
    std::size_t v = 1;
    for (std::size_t n : data.grid) {
        v *= n;
    }
    if (static_cast<std::size_t>(data.y.cols()) != v || data.y_holdout.cols() != data.y.cols()) {
        throw std::runtime_error(dir.string() + ": data width does not match grid " + format_grid(data.grid));
    }
    if (meta.value("has_truth", false)) {
        GroundTruth truth;
        truth.features = read_matrix(dir / "S_true.ismx");
        truth.weights = read_matrix(dir / "W_true.ismx");
        truth.holdout_weights = read_matrix(dir / "W_holdout_true.ismx");
        truth.latent = read_matrix(dir / "X_true.ismx");
        truth.holdout_latent = read_matrix(dir / "X_holdout_true.ismx");
        data.truth = std::move(truth);
    }
    return data;
}

}  // namespace issfa::bench
