#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "issfa/bench/config.hpp"
#include "issfa/bench/matrix_io.hpp"
#include "issfa/bench/metrics.hpp"
#include "issfa/bench/simulate.hpp"
#include "issfa/bench/svd_baseline.hpp"
#include "issfa/random.hpp"

namespace {

namespace fs = std::filesystem;
using issfa::Matrix;
using issfa::Rng;
using issfa::RowMatrix;
using issfa::Vector;

RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    RowMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.normal();
    }
    return m;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("issfa_test_bench_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---- configuration -------------------------------------------------------

TEST(Config, EmptyTextGivesDefaults) {
    const issfa::bench::ExperimentConfig c = issfa::bench::parse_config("");
    EXPECT_EQ(c.sim.grid, (std::vector<std::size_t>{32, 32}));
    EXPECT_EQ(c.run.sweeps, 2000u);
    EXPECT_EQ(c.prior.max_new_features, 10);
}

TEST(Config, ParsesSectionsAndComments) {
    const issfa::bench::ExperimentConfig c = issfa::bench::parse_config(
        "# comment\n[sim]\ngrid = 8x8x8\nnoise_variance = 0.25\n[prior]\ntheta_mh = true\nxi2_mean = 4.5\n"
        "[sampler]\nsweeps = 12\ninit = prior\n");
    EXPECT_EQ(c.sim.grid, (std::vector<std::size_t>{8, 8, 8}));
    EXPECT_EQ(c.sim.dimension(), 512u);
    EXPECT_DOUBLE_EQ(c.sim.noise_variance, 0.25);
    EXPECT_TRUE(c.prior.theta_mh);
    EXPECT_DOUBLE_EQ(c.prior.xi_mean[1], 4.5);
    EXPECT_EQ(c.run.sweeps, 12u);
    EXPECT_EQ(c.run.init.method, issfa::sampler::InitMethod::kPrior);
}

TEST(Config, ErrorsNameTheOffendingKey) {
    auto message = [](const std::string& text) {
        try {
            (void)issfa::bench::parse_config(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("[sim]\nbogus = 1\n").find("sim.bogus"), std::string::npos);
    EXPECT_NE(message("[nope]\nx = 1\n").find("nope"), std::string::npos);
    EXPECT_NE(message("[sampler]\nsweeps = ten\n").find("sampler.sweeps"), std::string::npos);
    EXPECT_NE(message("[sim]\ngrid = 8x\n").find("sim.grid"), std::string::npos);
    EXPECT_NE(message("[sim]\nactivation_prob = 1.5\n").find("sim.activation_prob"), std::string::npos);
    EXPECT_NE(message("[sampler]\nthin = 0\n").find("sampler.thin"), std::string::npos);
    EXPECT_NE(message("[prior]\ntheta_mh = maybe\n").find("prior.theta_mh"), std::string::npos);
}

TEST(Config, FormatRoundTrips) {
    issfa::bench::ExperimentConfig c;
    c.sim.grid = {4, 6};
    c.sim.theta2 = 0.1 + 0.2;  // not exactly representable in short decimal
    c.prior.beta_step = 0.37;
    c.prior.theta_mh = true;
    c.run.seed = 123456789012345ull;
    c.run.write_pgm = false;
    const std::string text = issfa::bench::format_config(c);
    const issfa::bench::ExperimentConfig back = issfa::bench::parse_config(text);
    EXPECT_EQ(issfa::bench::format_config(back), text);
    EXPECT_EQ(back.sim.theta2, c.sim.theta2);
    EXPECT_EQ(back.run.seed, c.run.seed);
    EXPECT_FALSE(back.run.write_pgm);
}

TEST(Config, GridHelpers) {
    EXPECT_EQ(issfa::bench::parse_grid("32x32"), (std::vector<std::size_t>{32, 32}));
    EXPECT_EQ(issfa::bench::parse_grid("64"), (std::vector<std::size_t>{64}));
    EXPECT_EQ(issfa::bench::format_grid({8, 8, 8}), "8x8x8");
    EXPECT_THROW((void)issfa::bench::parse_grid("x8"), std::invalid_argument);
    EXPECT_THROW((void)issfa::bench::parse_grid("8*8"), std::invalid_argument);
}

// ---- matrix files --------------------------------------------------------

TEST(MatrixIo, RoundTripWithSidecar) {
    const fs::path dir = scratch_dir("io");
    Rng rng(81);
    const RowMatrix m = random_matrix(5, 7, rng);
    issfa::bench::write_matrix(dir / "m.ismx", m, {42, "unit test"});
    EXPECT_EQ(issfa::bench::read_matrix(dir / "m.ismx"), m);
    std::ifstream side(dir / "m.ismx.json");
    ASSERT_TRUE(side.good());
    const std::string json((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
    EXPECT_NE(json.find("42"), std::string::npos);
    EXPECT_NE(json.find("unit test"), std::string::npos);

    const std::vector<std::uint64_t> dims = {2, 3, 4};
    std::vector<double> values(24);
    std::iota(values.begin(), values.end(), 0.0);
    issfa::bench::write_array(dir / "a.ismx", dims, values.data(), {1, ""});
    const issfa::bench::ArrayFile a = issfa::bench::read_array(dir / "a.ismx");
    EXPECT_EQ(a.dims, dims);
    EXPECT_EQ(a.values, values);
    EXPECT_THROW((void)a.matrix(), std::runtime_error);
}

TEST(MatrixIo, CorruptFilesThrow) {
    const fs::path dir = scratch_dir("io_bad");
    EXPECT_THROW((void)issfa::bench::read_matrix(dir / "missing.ismx"), std::runtime_error);
    std::ofstream(dir / "junk.ismx") << "hello world";
    EXPECT_THROW((void)issfa::bench::read_matrix(dir / "junk.ismx"), std::runtime_error);
    issfa::bench::write_matrix(dir / "t.ismx", RowMatrix::Ones(4, 4), {});
    fs::resize_file(dir / "t.ismx", fs::file_size(dir / "t.ismx") - 8);
    EXPECT_THROW((void)issfa::bench::read_matrix(dir / "t.ismx"), std::runtime_error);
}

TEST(MatrixIo, PgmScalesToFullRange) {
    const fs::path dir = scratch_dir("pgm");
    Vector px(6);
    px << -1.0, 0.0, 1.0, 3.0, 2.0, -1.0;
    issfa::bench::write_pgm(dir / "f.pgm", px, 2, 3);
    std::ifstream in(dir / "f.pgm", std::ios::binary);
    std::string magic;
    int w = 0;
    int h = 0;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    in.get();
    EXPECT_EQ(magic, "P5");
    EXPECT_EQ(w, 3);
    EXPECT_EQ(h, 2);
    EXPECT_EQ(maxval, 255);
    std::vector<unsigned char> bytes(6);
    in.read(reinterpret_cast<char*>(bytes.data()), 6);
    EXPECT_EQ(bytes[0], 0);
    EXPECT_EQ(bytes[3], 255);
    EXPECT_EQ(bytes[5], 0);
    EXPECT_NEAR(bytes[2], 127.5, 1.0);

    issfa::bench::write_pgm(dir / "c.pgm", Vector::Constant(4, 2.0), 2, 2);
    EXPECT_THROW(issfa::bench::write_pgm(dir / "x.pgm", px, 2, 2), std::invalid_argument);
}

// ---- simulation ----------------------------------------------------------

TEST(Simulate, NoiselessSingleFeatureRowsAreScaledFeature) {
    issfa::bench::SimConfig c;
    c.grid = {4, 4};
    c.observations = 10;
    c.holdout = 3;
    c.features = 1;
    c.activation_prob = 1.0;
    c.noise_variance = 0.0;
    Rng rng(82);
    const issfa::bench::Dataset d = issfa::bench::simulate(c, rng);
    ASSERT_TRUE(d.truth.has_value());
    const issfa::bench::GroundTruth& t = *d.truth;
    for (Eigen::Index r = 0; r < 10; ++r) {
        EXPECT_LT((d.y.row(r) - t.weights(r, 0) * t.features.row(0)).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_LT((d.y_holdout - t.holdout_weights * t.features).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(d.y_holdout.rows(), 3);
}

TEST(Simulate, ActivationRateAndUnitFeatures) {
    issfa::bench::SimConfig c;
    c.grid = {8, 8};
    c.observations = 5000;
    c.holdout = 0;
    c.features = 4;
    c.activation_prob = 0.3;
    Rng rng(83);
    const issfa::bench::Dataset d = issfa::bench::simulate(c, rng);
    const issfa::bench::GroundTruth& t = *d.truth;
    for (Eigen::Index k = 0; k < 4; ++k) {
        EXPECT_NEAR(t.features.row(k).norm(), 1.0, 1e-12);
    }
    const double active = static_cast<double>((t.weights.array() != 0.0).count()) / 5000.0;
    EXPECT_NEAR(active, 4 * 0.3, 3.0 * std::sqrt(4 * 0.3 * 0.7 / 5000.0));
    EXPECT_LT((t.latent - t.weights * t.features).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(d.y_holdout.rows(), 0);
}

TEST(Simulate, SaveLoadRoundTrip) {
    const fs::path dir = scratch_dir("sim");
    issfa::bench::SimConfig c;
    c.grid = {4, 3};
    c.observations = 6;
    c.holdout = 2;
    c.features = 2;
    Rng rng(84);
    const issfa::bench::Dataset d = issfa::bench::simulate(c, rng);
    issfa::bench::save_dataset(d, dir);
    const issfa::bench::Dataset back = issfa::bench::load_dataset(dir);
    EXPECT_EQ(back.grid, d.grid);
    EXPECT_EQ(back.y, d.y);
    EXPECT_EQ(back.y_holdout, d.y_holdout);
    ASSERT_TRUE(back.truth.has_value());
    EXPECT_EQ(back.truth->features, d.truth->features);
    EXPECT_EQ(back.truth->holdout_latent, d.truth->holdout_latent);
}

TEST(Simulate, SameSeedSameData) {
    issfa::bench::SimConfig c;
    c.grid = {4, 4};
    c.observations = 8;
    Rng a(85);
    Rng b(85);
    EXPECT_EQ(issfa::bench::simulate(c, a).y, issfa::bench::simulate(c, b).y);
}

// ---- SVD baseline --------------------------------------------------------

TEST(Svd, FullRankReconstructsExactly) {
    Rng rng(86);
    const RowMatrix y = random_matrix(6, 9, rng);
    const issfa::bench::SvdBaseline s = issfa::bench::svd_baseline(y, 6);
    EXPECT_LT((s.reconstruction - y).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((s.weights * s.features - s.reconstruction).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((s.features * s.features.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Svd, RankOneRecovery) {
    Vector u(4);
    u << 1, -2, 0.5, 3;
    Vector v(5);
    v << 0.1, 0.2, -0.3, 0.4, 1.0;
    const RowMatrix y = u * v.transpose();
    const issfa::bench::SvdBaseline s = issfa::bench::svd_baseline(y, 1);
    EXPECT_LT((s.reconstruction - y).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(s.features.row(0).dot(v.normalized())), 1.0, 1e-12);
}

TEST(Svd, TruncationErrorIsDiscardedSpectrum) {
    Rng rng(87);
    const RowMatrix y = random_matrix(20, 30, rng);
    const issfa::bench::SvdBaseline s = issfa::bench::svd_baseline(y, 5);
    const Eigen::JacobiSVD<Matrix> full(Matrix(y), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector sv = full.singularValues();
    EXPECT_NEAR((y - s.reconstruction).squaredNorm(), sv.tail(15).squaredNorm(), 1e-8);
    EXPECT_LT((s.singular_values - sv).cwiseAbs().maxCoeff(), 1e-10);
    // Projection of the training rows reproduces the truncated reconstruction.
    EXPECT_LT((s.project(y) - s.reconstruction).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Svd, RejectsBadRank) {
    const RowMatrix y = RowMatrix::Ones(3, 4);
    EXPECT_THROW((void)issfa::bench::svd_baseline(y, 0), std::invalid_argument);
    EXPECT_THROW((void)issfa::bench::svd_baseline(y, 4), std::invalid_argument);
}

// ---- metrics -------------------------------------------------------------

// Direct reading of the definition: unit-normalise, try both signs of every
// candidate, and take the squared Euclidean distance.
double brute_force_er(const RowMatrix& a, const RowMatrix& b) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const Eigen::RowVectorXd ak = a.row(k) / a.row(k).norm();
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            const Eigen::RowVectorXd bj = b.row(j) / b.row(j).norm();
            for (double sign : {1.0, -1.0}) {
                best = std::min(best, (ak - sign * bj).squaredNorm());
            }
        }
        total += best;
    }
    return total;
}

TEST(MetricEr, IdenticalAndSignFlipped) {
    Rng rng(88);
    const RowMatrix a = random_matrix(4, 10, rng);
    EXPECT_NEAR(issfa::bench::metric_er(a, a), 0.0, 1e-12);
    EXPECT_NEAR(issfa::bench::metric_er(a, -a), 0.0, 1e-12);
    EXPECT_NEAR(issfa::bench::metric_er(a, 3.0 * a), 0.0, 1e-12);
}

TEST(MetricEr, MatchesBruteForce) {
    Rng rng(89);
    for (int rep = 0; rep < 20; ++rep) {
        const RowMatrix a = random_matrix(1 + rep % 5, 6, rng);
        const RowMatrix b = random_matrix(1 + rep % 3, 6, rng);
        EXPECT_NEAR(issfa::bench::metric_er(a, b), brute_force_er(a, b), 1e-10);
    }
    EXPECT_THROW((void)issfa::bench::metric_er(RowMatrix(0, 6), RowMatrix::Ones(1, 6)), std::invalid_argument);
    EXPECT_THROW((void)issfa::bench::metric_er(RowMatrix::Ones(1, 5), RowMatrix::Ones(1, 6)), std::invalid_argument);
}

TEST(Kurtosis, StandardNormalIsNearZero) {
    Rng rng(90);
    std::vector<double> x(1000000);
    for (double& v : x) {
        v = rng.normal();
    }
    EXPECT_NEAR(issfa::bench::excess_kurtosis(x), 0.0, 0.03);
}

TEST(Kurtosis, SpikeAndSlabMatchesClosedForm) {
    // X = B·N with B ~ Bern(p): E X² = p, E X⁴ = 3p, so the excess kurtosis is 3/p − 3.
    Rng rng(91);
    const double p = 0.05;
    std::vector<double> x(1000000);
    for (double& v : x) {
        v = rng.bernoulli(p) ? rng.normal() : 0.0;
    }
    const double expected = 3.0 / p - 3.0;
    EXPECT_NEAR(issfa::bench::excess_kurtosis(x), expected, 0.05 * expected);
}

TEST(Kurtosis, DegenerateInputsThrow) {
    const std::vector<double> constant(10, 2.0);
    EXPECT_THROW((void)issfa::bench::excess_kurtosis(constant), std::invalid_argument);
    const std::vector<double> short_input = {1.0, 2.0, 3.0};
    EXPECT_THROW((void)issfa::bench::excess_kurtosis(short_input), std::invalid_argument);
}

double total_similarity(const std::vector<issfa::bench::FeatureMatch>& m) {
    double s = 0.0;
    for (const auto& x : m) {
        s += x.similarity;
    }
    return s;
}

// Best total |cos| over all injective assignments of the smaller side.
double optimal_assignment(const RowMatrix& truth, const RowMatrix& est) {
    const bool swap = truth.rows() > est.rows();
    const RowMatrix& small = swap ? est : truth;
    const RowMatrix& large = swap ? truth : est;
    std::vector<int> idx(static_cast<std::size_t>(large.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    double best = 0.0;
    do {
        double s = 0.0;
        for (Eigen::Index k = 0; k < small.rows(); ++k) {
            const Eigen::Index j = idx[static_cast<std::size_t>(k)];
            s += std::abs(small.row(k).dot(large.row(j))) / (small.row(k).norm() * large.row(j).norm());
        }
        best = std::max(best, s);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

TEST(MatchFeatures, RecoversPermutationAndScale) {
    Rng rng(92);
    const RowMatrix truth = random_matrix(5, 12, rng);
    const std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};
    RowMatrix est(5, 12);
    for (Eigen::Index k = 0; k < 5; ++k) {
        est.row(k) = (k % 2 == 0 ? -2.5 : 0.7) * truth.row(perm[static_cast<std::size_t>(k)]);
    }
    const std::vector<issfa::bench::FeatureMatch> m = issfa::bench::match_features(truth, est);
    ASSERT_EQ(m.size(), 5u);
    for (const auto& x : m) {
        EXPECT_NEAR(x.similarity, 1.0, 1e-12);
        EXPECT_EQ(static_cast<Eigen::Index>(x.truth), perm[x.estimate]);
    }
}

TEST(MatchFeatures, GreedyAgainstExhaustiveAssignment) {
    Rng rng(93);
    int optimal_hits = 0;
    double worst_ratio = 1.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto kt = static_cast<Eigen::Index>(1 + rep % 6);
        const auto ke = static_cast<Eigen::Index>(1 + (rep / 6) % 6);
        const RowMatrix truth = random_matrix(kt, 8, rng);
        const RowMatrix est = random_matrix(ke, 8, rng);
        const std::vector<issfa::bench::FeatureMatch> m = issfa::bench::match_features(truth, est);
        ASSERT_EQ(m.size(), static_cast<std::size_t>(std::min(kt, ke)));
        const double greedy = total_similarity(m);
        const double best = optimal_assignment(truth, est);
        EXPECT_LE(greedy, best + 1e-12);
        // Greedy max-weight matching is a 1/2-approximation.
        EXPECT_GE(greedy, 0.5 * best - 1e-12);
        optimal_hits += greedy >= best - 1e-12;
        worst_ratio = std::min(worst_ratio, greedy / best);
    }
    RecordProperty("greedy_optimal_fraction", std::to_string(static_cast<double>(optimal_hits) / reps));
    RecordProperty("greedy_worst_ratio", std::to_string(worst_ratio));
    std::cout << "greedy matched the optimum in " << optimal_hits << "/" << reps
              << " cases; worst greedy/optimal ratio " << worst_ratio << '\n';
}

TEST(ReconstructionAverage, Means) {
    issfa::bench::ReconstructionAverage avg;
    EXPECT_THROW((void)avg.mean(), std::logic_error);
    const RowMatrix a = RowMatrix::Constant(2, 3, 1.0);
    avg.add(a);
    EXPECT_EQ(avg.mean(), a);
    avg.add(RowMatrix::Constant(2, 3, 4.0));
    EXPECT_EQ(avg.mean(), RowMatrix::Constant(2, 3, 2.5));
    EXPECT_THROW(avg.add(RowMatrix::Zero(3, 3)), std::invalid_argument);

    Rng rng(94);
    const RowMatrix r = random_matrix(3, 3, rng);
    EXPECT_LT((issfa::bench::posterior_mean_reconstruction({r, r, r, r}) - r).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW((void)issfa::bench::posterior_mean_reconstruction({}), std::invalid_argument);
}

}  // namespace
