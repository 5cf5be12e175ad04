#include "qap/generators.hpp"
#include "qap/tt.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

using namespace qap;

namespace {

DenseTensor random_tensor(std::vector<Index> dims, RngStream& rng)
{
    DenseTensor X(std::move(dims));
    for (Index i = 0; i < X.size(); ++i) X.data(i) = rng.normal();
    return X;
}

TTTensor random_tt(const std::vector<Index>& dims, const std::vector<Index>& ranks, RngStream& rng)
{
    TTTensor T;
    T.dims = dims;
    Index r0 = 1;
    for (size_t k = 0; k < dims.size(); ++k) {
        Index r1 = k + 1 < dims.size() ? ranks[k] : 1;
        T.cores.push_back(gaussian_matrix(r0 * dims[k], r1, 1.0, rng));
        r0 = r1;
    }
    return T;
}

}  // namespace

TEST(Tensor, Indexing)
{
    DenseTensor X({2, 3, 4});
    for (Index i = 0; i < X.size(); ++i) X.data(i) = static_cast<double>(i);
    EXPECT_EQ(X({1, 2, 3}), 23.0);
    EXPECT_EQ(X.linear({0, 1, 0}), 4);
    EXPECT_THROW(X.linear({2, 0, 0}), std::out_of_range);
    DenseMatrix U = unfolding(X, 1);
    EXPECT_EQ(U.rows(), 2);
    EXPECT_EQ(U(1, 11), 23.0);
}

TEST(Ttsvd, RankOneExact)
{
    Vector u(3), v(4), w(5);
    u << 1, -2, 3;
    v << 0.5, 1, 2, -1;
    w << 1, 1, 2, 3, 5;
    DenseTensor X({3, 4, 5});
    for (Index a = 0; a < 3; ++a)
        for (Index b = 0; b < 4; ++b)
            for (Index c = 0; c < 5; ++c) X.data(X.linear({a, b, c})) = u(a) * v(b) * w(c);
    TTTensor T = ttsvd(X, TTTarget::with_ranks({1, 1}));
    EXPECT_EQ(T.ranks(), (std::vector<Index>{1, 1}));
    EXPECT_LE(tt_frobenius_error(X, T), 1e-9);
}

TEST(Ttsvd, MatrixCaseMatchesSvd)
{
    RngStream rng(1);
    DenseMatrix M = gaussian_matrix(12, 9, 1.0, rng);
    DenseTensor X({12, 9}, Eigen::Map<const Vector>(M.data(), M.size()));
    TTTensor T = ttsvd(X, TTTarget::with_ranks({4}));
    EXPECT_NEAR(tt_frobenius_error(X, T), frobenius_error(M, svd_truncate(M, 4)), 1e-12);
}

TEST(Ttsvd, ExactRanksRecovered)
{
    RngStream rng(2);
    TTTensor T = random_tt({6, 7, 5, 4}, {2, 3, 2}, rng);
    DenseTensor X = tt_materialize(T);
    TTTensor S = ttsvd(X, TTTarget::with_tol(1e-8));
    EXPECT_EQ(S.ranks(), (std::vector<Index>{2, 3, 2}));
    EXPECT_LE(tt_frobenius_error(X, S), 1e-9 * X.norm());
}

TEST(Ttsvd, ErrorBoundedByDiscardedMass)
{
    RngStream rng(3);
    for (int t = 0; t < 20; ++t) {
        DenseTensor X = random_tensor({4, 5, 3, 4}, rng);
        const Index r1 = 1 + static_cast<Index>(rng.below(4));
        const Index r2 = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(5 * r1, 12))));
        const Index r3 = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(3 * r2, 4))));
        std::vector<Index> ranks = {r1, r2, r3};
        TTSvdResult r = ttsvd_full(X, TTTarget::with_ranks(ranks));
        double disc = 0.0;
        for (double d : r.discarded_sq) disc += d;
        double err = tt_frobenius_error(X, r.tt);
        EXPECT_LE(err * err, disc * (1 + 1e-10) + 1e-20);
    }
}

TEST(Ttsvd, ToleranceRespected)
{
    RngStream rng(4);
    DenseTensor X = random_tensor({5, 6, 4, 3}, rng);
    for (double tol : {0.5, 0.2, 0.05}) {
        TTTensor T = ttsvd(X, TTTarget::with_tol(tol));
        EXPECT_LE(tt_frobenius_error(X, T), tol * X.norm() * (1 + 1e-12));
    }
    EXPECT_THROW(ttsvd(X, TTTarget::with_tol(0.0)), std::invalid_argument);
    EXPECT_THROW(ttsvd(X, TTTarget::with_ranks({1, 2})), std::invalid_argument);
    EXPECT_THROW(ttsvd(X, TTTarget::with_ranks({6, 2, 2})), std::invalid_argument);
}

TEST(Ttsvd, GaussianMixtureQtt)
{
    // Reference: ranks (2,2,2,3,3,4,5,4,2) and relative error 6.97e-3.
    const Vector v = gen_gaussian_mixture(load_mixture());
    const DenseTensor X = as_qtt(v);
    TTTensor T = ttsvd(X, TTTarget::with_tol(1e-2));
    const std::vector<Index> ref = {2, 2, 2, 3, 3, 4, 5, 4, 2};
    std::vector<Index> got = T.ranks();
    ASSERT_EQ(got.size(), ref.size());
    for (size_t k = 0; k < ref.size(); ++k) EXPECT_LE(std::abs(got[k] - ref[k]), 1) << "rank " << k;
    const double rel = tt_frobenius_error(X, T) / X.norm();
    EXPECT_NEAR(rel, 6.97e-3, 0.15 * 6.97e-3);
}

TEST(TtEntry, Examples)
{
    TTTensor ones;
    ones.dims = {3, 4, 2};
    ones.cores = {DenseMatrix::Ones(3, 1), DenseMatrix::Ones(4, 1), DenseMatrix::Ones(2, 1)};
    EXPECT_EQ(tt_entry(ones, {2, 3, 1}), 1.0);
    EXPECT_THROW(tt_entry(ones, {3, 0, 0}), std::out_of_range);

    RngStream rng(5);
    TTTensor T = random_tt({7, 6}, {3}, rng);
    DenseMatrix M = T.cores[0] * Eigen::Map<const DenseMatrix>(T.cores[1].data(), 3, 6);
    for (Index i = 0; i < 7; ++i)
        for (Index j = 0; j < 6; ++j) EXPECT_NEAR(tt_entry(T, {i, j}), M(i, j), 1e-13);

    Vector ramp(64);
    for (Index i = 0; i < 64; ++i) ramp(i) = static_cast<double>(i);
    DenseTensor Q = as_qtt(ramp);
    TTTensor R = ttsvd(Q, TTTarget::with_tol(1e-10));
    for (Index i = 0; i < 64; ++i) {
        std::vector<Index> bits(6);
        for (Index k = 0; k < 6; ++k) bits[k] = (i >> (5 - k)) & 1;
        EXPECT_NEAR(tt_entry(R, bits), static_cast<double>(i), 1e-10);
    }
    EXPECT_EQ(R.ranks(), std::vector<Index>(5, 2));
}

TEST(TtMaterialize, MatchesEntriesAndCap)
{
    RngStream rng(6);
    TTTensor T = random_tt({3, 4, 5}, {2, 3}, rng);
    DenseTensor X = tt_materialize(T);
    for (Index a = 0; a < 3; ++a)
        for (Index b = 0; b < 4; ++b)
            for (Index c = 0; c < 5; ++c) EXPECT_NEAR(X({a, b, c}), tt_entry(T, {a, b, c}), 1e-13);
    EXPECT_THROW(tt_materialize(T, 10), std::length_error);
}

TEST(TtApply, Transforms)
{
    TTTensor pos;
    pos.dims = {3, 2};
    pos.cores = {DenseMatrix::Constant(3, 1, 2.0), DenseMatrix::Constant(2, 1, 0.5)};
    DenseTensor same = tt_apply_entrywise(pos, {Transform::clamp_nonneg()});
    EXPECT_EQ(same.data, tt_materialize(pos).data);

    TTTensor one_neg;
    one_neg.dims = {4};
    Vector v(4);
    v << 1, -3, 2, 5;
    one_neg.cores = {DenseMatrix(v)};
    DenseTensor c = tt_apply_entrywise(one_neg, {Transform::clamp_nonneg()});
    EXPECT_EQ(c.data(1), 0.0);
    EXPECT_NEAR(v.squaredNorm() - c.data.squaredNorm(), 9.0, 1e-14);

    RngStream rng(7);
    TTTensor T = random_tt({4, 4, 4}, {2, 2}, rng);
    DenseTensor a = tt_apply_entrywise(T, {Transform::abs()});
    EXPECT_GE(a.data.minCoeff(), 0.0);
    EXPECT_EQ(negative_part_norms(a).fro, 0.0);
}

TEST(TtUnfoldingOracle, MatchesDenseUnfolding)
{
    RngStream rng(8);
    TTTensor T = random_tt({3, 4, 5}, {2, 2}, rng);
    DenseTensor X = tt_materialize(T);
    for (Index split : {1, 2}) {
        EntryOracle o = tt_unfolding_oracle(T, split);
        DenseMatrix U = unfolding(X, split);
        ASSERT_EQ(o.rows(), U.rows());
        for (Index i = 0; i < U.rows(); ++i)
            for (Index j = 0; j < U.cols(); ++j) EXPECT_NEAR(o(i, j), U(i, j), 1e-13);
    }
}

TEST(Qtt, ShapeAndRoundTrip)
{
    Vector v = Vector::LinSpaced(8, 0, 7);
    DenseTensor Q = as_qtt(v);
    EXPECT_EQ(Q.dims, (std::vector<Index>{2, 2, 2}));
    EXPECT_EQ(Q({1, 1, 0}), 6.0);
    EXPECT_THROW(as_qtt(Vector::Zero(6)), std::invalid_argument);

    RngStream rng(9);
    TTTensor T = random_tt({2, 3, 2}, {2, 2}, rng);
    auto path = std::filesystem::temp_directory_path() / "qap_tt.bin";
    write_tt(path.string(), T);
    TTTensor S = read_tt(path.string());
    EXPECT_EQ(S.dims, T.dims);
    for (size_t k = 0; k < T.cores.size(); ++k) EXPECT_EQ(S.cores[k], T.cores[k]);
    std::filesystem::remove(path);
}
