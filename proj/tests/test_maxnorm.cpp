#include "qap/generators.hpp"
#include "qap/maxnorm.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qap;

TEST(BallProject, Examples)
{
    DenseMatrix X(2, 2), Y(2, 2);
    X << 1, 2, 3, 4;
    Y << 1.2, 1.9, 3.0, 3.5;
    EXPECT_EQ(ball_project(Y, X, 0.5), Y);

    DenseMatrix z = DenseMatrix::Zero(1, 1), y = DenseMatrix::Constant(1, 1, 3.0);
    EXPECT_EQ(ball_project(y, z, 1.0)(0, 0), 1.0);
    EXPECT_EQ(ball_project(DenseMatrix(-y), z, 1.0)(0, 0), -1.0);

    RngStream rng(1);
    for (double eps : {0.0, 0.1, 0.7}) {
        DenseMatrix A = gaussian_matrix(15, 11, 1.0, rng), B = gaussian_matrix(15, 11, 1.0, rng);
        DenseMatrix P = ball_project(B, A, eps);
        EXPECT_LE(max_abs(P - A), eps);
        for (Index i = 0; i < A.size(); ++i)
            if (std::abs(B.data()[i] - A.data()[i]) <= eps) EXPECT_EQ(P.data()[i], B.data()[i]);
    }
    Vector a = Vector::Zero(3), b(3);
    b << -2, 0.25, 5;
    Vector pv = ball_project(b, a, 0.5);
    EXPECT_EQ(pv(0), -0.5);
    EXPECT_EQ(pv(1), 0.25);
    EXPECT_EQ(pv(2), 0.5);
}

TEST(InnerAp, ExactRankOneIteration)
{
    RngStream rng(2);
    DenseMatrix X = gaussian_matrix(20, 3, 1.0, rng) * gaussian_matrix(3, 16, 1.0, rng);
    FactoredMatrix Y0(gaussian_matrix(20, 3, 1.0, rng), gaussian_matrix(16, 3, 1.0, rng));
    InnerResult res = inner_ap(X, 3, 0.0, Y0, InnerOptions{}, rng);
    EXPECT_LE(res.iters, 2);
    EXPECT_LE(res.err_max, 1e-9 * max_abs(X));
}

TEST(InnerAp, IdentityRankOneHalf)
{
    DenseMatrix I = DenseMatrix::Identity(2, 2);
    DenseMatrix h = DenseMatrix::Constant(2, 1, std::sqrt(0.5));
    FactoredMatrix Y0(h, h);
    RngStream rng(3);
    InnerResult res = inner_ap(I, 1, 0.5, Y0, InnerOptions{}, rng);
    EXPECT_LE(res.err_max, 0.5 + 1e-9);
    EXPECT_NEAR(max_error(I, res.Y), res.err_max, 1e-15);
}

TEST(InnerAp, ErrorsNeverJumpBeyondDelta)
{
    RngStream rng(4);
    DenseMatrix X = haar_orthogonal(60, rng);
    InnerOptions opt;
    opt.delta = 1e-3;
    opt.max_iters = 300;
    for (double eps : {0.05, 0.15, 0.3}) {
        FactoredMatrix Y0 = maxnorm_start(X, 6, Y0Policy::HaarFactors, rng);
        InnerResult res = inner_ap(X, 6, eps, Y0, opt, rng);
        ASSERT_EQ(static_cast<Index>(res.errors.size()), res.iters + 1);
        for (size_t k = 1; k + 1 < res.errors.size(); ++k)
            EXPECT_LT(res.errors[k], (1 + opt.delta) * res.errors[k - 1]) << "eps " << eps << " step " << k;
        EXPECT_EQ(res.errors.back(), res.err_max);
    }
}

TEST(Maxnorm, ExactRank)
{
    RngStream rng(5);
    DenseMatrix X = gaussian_matrix(30, 4, 1.0, rng) * gaussian_matrix(4, 25, 1.0, rng);
    MaxnormResult res = maxnorm_approximate(X, 4, svd_truncate(X, 4), MaxnormOptions{}, rng);
    EXPECT_LE(res.eps_certified, 1e-9 * max_abs(X));
}

TEST(Maxnorm, CertifiedByScan)
{
    RngStream rng(6);
    for (Index r : {3, 6}) {
        DenseMatrix X = haar_orthogonal(48, rng);
        MaxnormResult res = maxnorm_approximate(X, r, maxnorm_start(X, r, Y0Policy::HaarFactors, rng), MaxnormOptions{}, rng);
        EXPECT_LE(max_error(X, res.Y), res.eps_certified + 1e-12);
        EXPECT_LT(res.eps_certified, max_abs(X));
        EXPECT_GT(res.outer_iters, 0);
    }
}

TEST(Maxnorm, StartPolicies)
{
    RngStream rng(7);
    DenseMatrix X = DenseMatrix::Identity(40, 40);
    FactoredMatrix g = maxnorm_start(X, 4, Y0Policy::GaussianFactors, rng);
    EXPECT_EQ(g.rank(), 4);
    EXPECT_EQ(g.left.rows(), 40);
    FactoredMatrix s = maxnorm_start(X, 4, Y0Policy::Svd, rng);
    EXPECT_EQ(s.rank(), 4);
    RngStream a(8), b(8);
    EXPECT_EQ(maxnorm_start(X, 3, Y0Policy::HaarFactors, a).left, maxnorm_start(X, 3, Y0Policy::HaarFactors, b).left);
}

TEST(UdellRank, Formula)
{
    EXPECT_EQ(udell_rank(1, 1.0), 80u);
    EXPECT_EQ(udell_rank(1600, 0.5), 2325u);
    for (std::uint64_t n : {10u, 1000u, 123456u}) {
        double raw = 72.0 * std::log1p(2.0 * static_cast<double>(n));
        EXPECT_EQ(udell_rank(n, 1.0), static_cast<std::uint64_t>(std::ceil(raw)));
        EXPECT_EQ(udell_rank(n, 0.5), static_cast<std::uint64_t>(std::ceil(4.0 * raw)));
    }
}

TEST(MaxnormTt, ExactRank)
{
    RngStream rng(9);
    QuantizedTensor q = gen_quantized_tt(8, 2, rng);
    DenseTensor X = tt_materialize(q.exact);
    MaxnormTTResult res = maxnorm_approximate_tt(X, {2, 2}, MaxnormOptions{});
    EXPECT_LE(res.eps_certified, 1e-9 * X.data.cwiseAbs().maxCoeff());
}

TEST(MaxnormTt, CertifiedByScan)
{
    RngStream rng(10);
    QuantizedTensor q = gen_quantized_tt(12, 3, rng);
    MaxnormTTResult res = maxnorm_approximate_tt(q.X, {3, 3}, MaxnormOptions{});
    DenseTensor Y = tt_materialize(res.Y);
    EXPECT_LE((Y.data - q.X.data).cwiseAbs().maxCoeff(), res.eps_certified + 1e-12);
    EXPECT_LE(res.eps_certified, 0.5 + 1e-12);
}

TEST(Maxnorm, QuantizedRankFiveMean)
{
    // Reference mean 0.494 over 20 trials.
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream rng(seed);
        QuantizedMatrix q = gen_quantized_matrix(200, 5, rng);
        MaxnormOptions opt;
        opt.inner.delta = 1e-4;
        opt.inner.max_iters = 5000;
        opt.eps_plus_cap = 0.5;
        MaxnormResult res = maxnorm_approximate(q.X, 5, svd_truncate(q.X, 5), opt, rng);
        EXPECT_LT(res.eps_certified, 0.5) << "seed " << seed;
        sum += res.eps_certified;
    }
    const double mean = sum / 20.0;
    EXPECT_GE(mean, 0.48);
    EXPECT_LE(mean, 0.51);
}
