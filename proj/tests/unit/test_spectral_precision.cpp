#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dense_oracle.hpp"
#include "issfa/gmrf/ortho_transform.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/gmrf/spectral_precision.hpp"
#include "issfa/random.hpp"

namespace {

using issfa::Matrix;
using issfa::Rng;
using issfa::Vector;
using issfa::gmrf::OrthoTransform;
using issfa::gmrf::SpectralCurve;
using issfa::gmrf::SpectralPrecision;

const std::vector<std::vector<std::size_t>> kOracleSizes = {{4}, {8}, {16}, {32}, {64}, {8, 8}, {4, 4, 4}, {2, 3, 2}};

Vector random_vector(std::size_t n, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = rng.normal();
    }
    return v;
}

Vector theta2(double a, double b) {
    Vector t(2);
    t << a, b;
    return t;
}

SpectralPrecision affine_precision(const std::vector<std::size_t>& dims, const Vector& theta) {
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct(dims));
    return SpectralPrecision(tr, SpectralCurve::affine(issfa::gmrf::grid_laplacian_eigenvalues(dims)), theta);
}

Matrix dense_q(const SpectralPrecision& prec) {
    return issfa::testing::spectral_matrix(issfa::testing::transform_matrix(prec.transform()), prec.eigenvalues());
}

TEST(LogDensity, StandardNormalAtOrigin) {
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({1}));
    const SpectralPrecision prec(tr, SpectralCurve::unit(1), Vector(0));
    EXPECT_NEAR(prec.log_density(Vector::Zero(1)), -0.5 * std::log(2.0 * std::numbers::pi), 1e-15);
}

TEST(LogDensity, IdentityPrecisionIsSumOfUnivariate) {
    Rng rng(1);
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({4, 4}));
    const SpectralPrecision prec(tr, SpectralCurve::unit(16), Vector(0));
    const Vector s = random_vector(16, rng);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        expected += -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * s[i] * s[i];
    }
    EXPECT_NEAR(prec.log_density(s), expected, 1e-12);
}

TEST(LogDensity, ReferenceGridMatchesDenseCholesky) {
    Rng rng(2);
    const SpectralPrecision prec = affine_precision({8, 8}, theta2(1.0, 100.0));
    const Matrix q = dense_q(prec);
    for (int rep = 0; rep < 10; ++rep) {
        const Vector s = random_vector(64, rng) * 0.1;
        EXPECT_NEAR(prec.log_density(s), issfa::testing::mvn_log_density_precision(s, q), 1e-8);
    }
}

TEST(LogDensity, NonPositiveEigenvalueThrows) {
    // The scaled curve h = θγ has h_0 = 0 on a DCT grid.
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({8}));
    const SpectralPrecision prec(tr, SpectralCurve::scaled(issfa::gmrf::laplacian_eigenvalues(8)), Vector::Ones(1));
    EXPECT_THROW((void)prec.log_density(Vector::Zero(8)), std::domain_error);
    EXPECT_THROW((void)prec.logdet(), std::domain_error);
    Rng rng(3);
    EXPECT_THROW((void)prec.sample(rng), std::domain_error);
    EXPECT_THROW((void)prec.grad_log_density_theta(Vector::Zero(8)), std::domain_error);
}

TEST(SpectralPrecision, RejectsNonPositiveTheta) {
    EXPECT_THROW(affine_precision({4}, theta2(-1.0, 1.0)), std::invalid_argument);
    EXPECT_THROW(affine_precision({4}, theta2(1.0, 0.0)), std::invalid_argument);
    EXPECT_THROW(affine_precision({4}, Vector::Ones(3)), std::invalid_argument);
}

TEST(SpectralPrecision, LogdetAndDenseMatrixSpd) {
    for (const auto& dims : kOracleSizes) {
        const SpectralPrecision prec = affine_precision(dims, theta2(0.3, 7.0));
        const Matrix q = dense_q(prec);
        EXPECT_LT((q - q.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        const Eigen::LLT<Matrix> llt(q);
        ASSERT_EQ(llt.info(), Eigen::Success);
        const double dense_logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        EXPECT_NEAR(prec.logdet(), dense_logdet, 1e-8);
    }
}

class SpectralOracle : public ::testing::TestWithParam<std::vector<std::size_t>> {};

TEST_P(SpectralOracle, DenseAgreement) {
    const std::vector<std::size_t> dims = GetParam();
    Rng rng(40 + dims.size() * 100 + dims[0]);
    for (int rep = 0; rep < 5; ++rep) {
        const Vector theta = theta2(std::exp(rng.normal()), std::exp(2.0 + rng.normal()));
        const SpectralPrecision prec = affine_precision(dims, theta);
        const std::size_t v = prec.size();
        const Matrix q = dense_q(prec);
        const Matrix l = issfa::testing::grid_laplacian(dims);
        const Vector s = random_vector(v, rng) * 0.3;

        EXPECT_NEAR(prec.log_density(s), issfa::testing::mvn_log_density_precision(s, q), 1e-8);
        EXPECT_NEAR(prec.quadratic_form(s), s.dot(q * s), 1e-8);
        EXPECT_NEAR(issfa::gmrf::base_quadratic_form(s, prec.transform(), prec.curve().gamma()), s.dot(l * s), 1e-8);

        const double c = std::exp(rng.normal());
        const Vector rhs = random_vector(v, rng);
        const Vector dense_solve = (c * Matrix::Identity(v, v) + q).ldlt().solve(rhs);
        EXPECT_LT((prec.solve_shifted(c, rhs) - dense_solve).cwiseAbs().maxCoeff(), 1e-8);
    }
}

INSTANTIATE_TEST_SUITE_P(AllSizes, SpectralOracle, ::testing::ValuesIn(kOracleSizes));

TEST(QuadraticForm, ZeroAndConstant) {
    const SpectralPrecision prec = affine_precision({8, 8}, theta2(1.0, 100.0));
    EXPECT_EQ(prec.quadratic_form(Vector::Zero(64)), 0.0);
    EXPECT_NEAR(issfa::gmrf::base_quadratic_form(Vector::Constant(64, 2.5), prec.transform(), prec.curve().gamma()),
                0.0, 1e-12);
}

TEST(GradLogDensity, ZeroSampleHasNoDataTerm) {
    const SpectralPrecision prec = affine_precision({4, 4}, theta2(2.0, 3.0));
    const Vector g = prec.grad_log_density_theta(Vector::Zero(16));
    const Vector gamma = prec.curve().gamma();
    double g1 = 0.0;
    double g2 = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i) {
        g1 += 0.5 / prec.eigenvalues()[i];
        g2 += 0.5 * gamma[i] / prec.eigenvalues()[i];
    }
    EXPECT_NEAR(g[0], g1, 1e-12);
    EXPECT_NEAR(g[1], g2, 1e-12);
}

TEST(GradLogDensity, IsotropicClosedForm) {
    Rng rng(5);
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({10}));
    Vector theta(1);
    theta << 1.7;
    const SpectralPrecision prec(tr, SpectralCurve::isotropic(10), theta);
    const Vector s = random_vector(10, rng);
    EXPECT_NEAR(prec.grad_log_density_theta(s)[0], 10.0 / (2.0 * 1.7) - 0.5 * s.squaredNorm(), 1e-12);
}

TEST(GradLogDensity, MatchesCentralDifferences) {
    Rng rng(6);
    int checked = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<std::size_t> dims = rep % 2 == 0 ? std::vector<std::size_t>{8, 8} : std::vector<std::size_t>{16};
        const Vector theta = theta2(std::exp(rng.normal()), std::exp(2.0 + rng.normal()));
        const SpectralPrecision prec = affine_precision(dims, theta);
        const Vector s = random_vector(prec.size(), rng) * std::exp(rng.normal() - 1.0);
        const Vector g = prec.grad_log_density_theta(s);
        for (Eigen::Index p = 0; p < 2; ++p) {
            const double step = 1e-5 * theta[p];
            Vector up = theta;
            Vector down = theta;
            up[p] += step;
            down[p] -= step;
            const double fd = (prec.with_theta(up).log_density(s) - prec.with_theta(down).log_density(s)) / (2.0 * step);
            EXPECT_LE(std::abs(g[p] - fd), 1e-5 * std::max(std::abs(g[p]), 1e-3)) << "rep " << rep << " p " << p;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 100);
}

TEST(Sample, IdentityPrecisionMarginalsPassKs) {
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({8}));
    const SpectralPrecision prec(tr, SpectralCurve::unit(8), Vector(0));
    Rng rng(7);
    const int n = 100000;
    std::vector<std::vector<double>> cols(8);
    for (int i = 0; i < n; ++i) {
        const Vector s = prec.sample(rng);
        for (int j = 0; j < 8; ++j) {
            cols[static_cast<std::size_t>(j)].push_back(s[j]);
        }
    }
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // α = 0.01
    for (auto& c : cols) {
        std::sort(c.begin(), c.end());
        double d = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double f = 0.5 * std::erfc(-c[i] / std::numbers::sqrt2);
            d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
        }
        EXPECT_LT(d, critical);
    }
}

TEST(Sample, EmpiricalCovarianceMatchesInverse) {
    const SpectralPrecision prec = affine_precision({8}, theta2(1.0, 100.0));
    const Matrix cov = dense_q(prec).inverse();
    Rng rng(8);
    const int n = 200000;
    Matrix acc = Matrix::Zero(8, 8);
    for (int i = 0; i < n; ++i) {
        const Vector s = prec.sample(rng);
        acc += s * s.transpose();
    }
    acc /= n;
    EXPECT_LT((acc - cov).norm() / cov.norm(), 0.05);
}

TEST(Sample, FixedSeedIsBitIdentical) {
    const SpectralPrecision prec = affine_precision({8, 8}, theta2(1.0, 100.0));
    Rng a(9);
    Rng b(9);
    EXPECT_EQ(prec.sample(a), prec.sample(b));
    EXPECT_EQ(prec.sample_shifted(2.0, Vector::Ones(64), a), prec.sample_shifted(2.0, Vector::Ones(64), b));
}

TEST(SolveShifted, UnshiftedAndIdentityCases) {
    Rng rng(10);
    const SpectralPrecision prec = affine_precision({4, 4}, theta2(0.5, 2.0));
    const Matrix u = issfa::testing::transform_matrix(prec.transform());
    const Vector rhs = random_vector(16, rng);
    const Vector expected = u * prec.eigenvalues().cwiseInverse().asDiagonal() * u.transpose() * rhs;
    EXPECT_LT((prec.solve_shifted(0.0, rhs) - expected).cwiseAbs().maxCoeff(), 1e-10);

    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({4, 4}));
    const SpectralPrecision unit(tr, SpectralCurve::unit(16), Vector(0));
    EXPECT_LT((unit.solve_shifted(1.0, rhs) - rhs / 2.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveShifted, SingularSystemThrows) {
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct({8}));
    const SpectralPrecision prec(tr, SpectralCurve::scaled(issfa::gmrf::laplacian_eigenvalues(8)), Vector::Ones(1));
    EXPECT_THROW((void)prec.solve_shifted(0.0, Vector::Ones(8)), std::domain_error);
    Rng rng(11);
    EXPECT_THROW((void)prec.sample_shifted(0.0, Vector::Ones(8), rng), std::domain_error);
    EXPECT_NO_THROW((void)prec.solve_shifted(0.5, Vector::Ones(8)));
}

TEST(SampleShifted, MomentsMatchDenseGaussian) {
    const SpectralPrecision prec = affine_precision({2, 2}, theta2(0.8, 1.5));
    const double c = 1.3;
    Vector rhs(4);
    rhs << 0.5, -1.0, 2.0, 0.25;
    const Matrix post = c * Matrix::Identity(4, 4) + dense_q(prec);
    const Matrix cov = post.inverse();
    const Vector mean = cov * rhs;
    Rng rng(12);
    const int n = 200000;
    Vector m = Vector::Zero(4);
    Matrix acc = Matrix::Zero(4, 4);
    for (int i = 0; i < n; ++i) {
        const Vector s = prec.sample_shifted(c, rhs, rng);
        m += s;
        acc += (s - mean) * (s - mean).transpose();
    }
    m /= n;
    acc /= n;
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(m[i], mean[i], 5.0 * std::sqrt(cov(i, i) / n));
    }
    EXPECT_LT((acc - cov).norm() / cov.norm(), 0.02);
}

TEST(Curve, AffineValuesAndPositivity) {
    const Vector gamma = issfa::gmrf::grid_laplacian_eigenvalues({4, 4});
    const SpectralCurve curve = SpectralCurve::affine(gamma);
    EXPECT_EQ(curve.parameter_count(), 2u);
    const Vector h = curve.values(theta2(1.0, 100.0));
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        EXPECT_NEAR(h[i], 1.0 + 100.0 * gamma[i], 1e-12);
        EXPECT_GT(h[i], 0.0);
        EXPECT_EQ(curve.eval(theta2(1.0, 100.0), static_cast<std::size_t>(i)), h[i]);
    }
    EXPECT_THROW(curve.check_parameters(theta2(0.0, 1.0)), std::invalid_argument);
    EXPECT_THROW(SpectralCurve::affine(-Vector::Ones(3)), std::invalid_argument);
}

TEST(Curve, GradientsMatchFiniteDifferences) {
    Rng rng(13);
    const Vector gamma = issfa::gmrf::grid_laplacian_eigenvalues({4, 4});
    const std::vector<SpectralCurve> curves = {
        SpectralCurve::affine(gamma),
        issfa::gmrf::curve_power_sum(SpectralCurve::affine(gamma), 2, 1),
        issfa::gmrf::curve_param_mix(SpectralCurve::affine(gamma)),
        issfa::gmrf::curve_power_sum(issfa::gmrf::curve_param_mix(SpectralCurve::affine(gamma)), 3),
    };
    for (const SpectralCurve& curve : curves) {
        for (int rep = 0; rep < 10; ++rep) {
            Vector theta(static_cast<Eigen::Index>(curve.parameter_count()));
            for (Eigen::Index p = 0; p < theta.size(); ++p) {
                theta[p] = std::exp(rng.normal());
            }
            const issfa::gmrf::CurveEvaluation ev = curve.evaluate(theta, 2);
            const auto pc = theta.size();
            for (std::size_t i = 0; i < curve.size(); ++i) {
                const Vector g = curve.grad(theta, i);
                for (Eigen::Index p = 0; p < pc; ++p) {
                    const double step = 1e-5 * theta[p];
                    Vector up = theta;
                    Vector down = theta;
                    up[p] += step;
                    down[p] -= step;
                    const double fd = (curve.eval(up, i) - curve.eval(down, i)) / (2.0 * step);
                    EXPECT_LE(std::abs(g[p] - fd), 1e-5 * std::max(std::abs(g[p]), 1e-6));
                    EXPECT_NEAR(ev.gradient(static_cast<Eigen::Index>(i), p), g[p], 1e-12 * std::max(1.0, std::abs(g[p])));
                    const Vector gu = curve.grad(up, i);
                    const Vector gd = curve.grad(down, i);
                    for (Eigen::Index q = 0; q < pc; ++q) {
                        const double fd2 = (gu[q] - gd[q]) / (2.0 * step);
                        const double h2 = ev.hessian(static_cast<Eigen::Index>(i), q * pc + p);
                        EXPECT_LE(std::abs(h2 - fd2), 1e-4 * std::max(std::abs(h2), 1e-3));
                    }
                }
            }
        }
    }
}

TEST(CurveCombinators, PowerSumIdentity) {
    const SpectralCurve base = SpectralCurve::affine(issfa::gmrf::grid_laplacian_eigenvalues({4, 4}));
    const SpectralCurve same = issfa::gmrf::curve_power_sum(base, 1);
    Rng rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        const Vector theta = theta2(std::exp(rng.normal()), std::exp(rng.normal()));
        EXPECT_LT((same.values(theta) - base.values(theta)).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((same.jacobian(theta) - base.jacobian(theta)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(CurveCombinators, SquarePlusOneIsDenseQSquaredPlusIdentity) {
    const std::vector<std::size_t> dims = {8, 8};
    auto tr = std::make_shared<const OrthoTransform>(OrthoTransform::dct(dims));
    const SpectralCurve base = SpectralCurve::affine(issfa::gmrf::grid_laplacian_eigenvalues(dims));
    const Vector theta = theta2(0.5, 2.0);
    const SpectralPrecision q(tr, base, theta);
    const SpectralPrecision q2(tr, issfa::gmrf::curve_power_sum(base, 2, 0), theta);
    const Matrix dq = dense_q(q);
    const Matrix expected = dq * dq + Matrix::Identity(64, 64);
    EXPECT_LT((dense_q(q2) - expected).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE((q2.eigenvalues().array() > 0.0).all());
}

TEST(CurveCombinators, ParamMixWithEqualHalvesDoubles) {
    const SpectralCurve base = SpectralCurve::affine(issfa::gmrf::grid_laplacian_eigenvalues({2, 3, 2}));
    const SpectralCurve mix = issfa::gmrf::curve_param_mix(base);
    EXPECT_EQ(mix.parameter_count(), 4u);
    Vector theta(4);
    theta << 0.7, 3.0, 0.7, 3.0;
    EXPECT_LT((mix.values(theta) - 2.0 * base.values(theta2(0.7, 3.0))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CurveCombinators, NegativeExponentRejected) {
    const SpectralCurve base = SpectralCurve::affine(issfa::gmrf::laplacian_eigenvalues(4));
    EXPECT_THROW((void)issfa::gmrf::curve_power_sum(base, -1), std::invalid_argument);
}

}  // namespace
