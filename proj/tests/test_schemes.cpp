#include "qap/generators.hpp"
#include "qap/schemes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace qap;

namespace {

DenseMatrix row(std::initializer_list<double> v)
{
    DenseMatrix M(1, static_cast<Index>(v.size()));
    Index j = 0;
    for (double x : v) M(0, j++) = x;
    return M;
}

RngStream& rng_unused()
{
    static RngStream r(0);
    return r;
}

}  // namespace

TEST(Names, RoundTrip)
{
    for (Scheme s : {Scheme::AP, Scheme::RP, Scheme::SP, Scheme::IP}) EXPECT_EQ(parse_scheme(to_string(s)), s);
    for (Projector p : {Projector::SVD, Projector::RSVD, Projector::VOL_warm, Projector::VOL_cold, Projector::PVOL_warm,
                        Projector::PVOL_cold, Projector::TTSVD})
        EXPECT_EQ(parse_projector(to_string(p)), p);
    EXPECT_THROW(parse_scheme("zz"), std::invalid_argument);
    EXPECT_THROW(parse_projector("zz"), std::invalid_argument);
}

TEST(ConstraintStep, Examples)
{
    DenseMatrix Y(2, 2);
    Y << 1, -2, 0, 3;
    DenseMatrix ap = constraint_step(Y, Scheme::AP, 0.0);
    DenseMatrix expect(2, 2);
    expect << 1, 0, 0, 3;
    EXPECT_EQ(ap, expect);

    DenseMatrix y = row({1, -2});
    double a_sp = compute_alpha(y, 0.5);
    EXPECT_EQ(a_sp, 1.0);
    EXPECT_EQ(constraint_step(y, Scheme::SP, a_sp), row({2, -1}));
    double a_ip = compute_alpha(y, 0.75);
    EXPECT_EQ(a_ip, 1.5);
    EXPECT_EQ(constraint_step(y, Scheme::IP, a_ip), row({1.5, 1.5}));
    EXPECT_EQ(constraint_step(y, Scheme::RP, 0.0), row({1, 2}));
}

TEST(ConstraintStep, FactoredMatchesDense)
{
    RngStream rng(1);
    FactoredMatrix Y(gaussian_matrix(8, 2, 1.0, rng), gaussian_matrix(6, 2, 1.0, rng));
    DenseMatrix D = Y.materialize();
    for (Scheme s : {Scheme::AP, Scheme::RP, Scheme::SP, Scheme::IP}) {
        EntryOracle o = constraint_step(Y, s, 0.3);
        DenseMatrix ref = constraint_step(D, s, 0.3);
        for (Index i = 0; i < 8; ++i)
            for (Index j = 0; j < 6; ++j) EXPECT_NEAR(o(i, j), ref(i, j), 1e-14);
    }
}

TEST(ComputeAlpha, Examples)
{
    EXPECT_EQ(compute_alpha(DenseMatrix::Constant(3, 3, 0.1), 0.5), 0.0);
    DenseMatrix Y(2, 2);
    Y << 1, -2, 0, 3;
    EXPECT_EQ(compute_alpha(Y, 0.5), 1.0);
    EXPECT_THROW(compute_alpha(Y, -1.0), std::invalid_argument);

    // One factor of constant sign: the row/column alternation cannot stall.
    Vector u(5), v(4);
    u << 1, 3, 2, 0.5, 1;
    v << 2, 1, -1, -4;
    FactoredMatrix R1{DenseMatrix(u), DenseMatrix(v)};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RngStream a(seed), b(seed);
        EXPECT_EQ(compute_alpha(R1, 0.5, AlphaMode::Surrogate, a), compute_alpha(R1, 0.5, AlphaMode::Exact, b));
    }
    EXPECT_EQ(compute_alpha(R1, 0.5, AlphaMode::Exact, rng_unused()), 6.0);
}

TEST(RunScheme, NonnegativeLowRankIsFixedPoint)
{
    RngStream rng(3);
    DenseMatrix L = gaussian_matrix(30, 3, 1.0, rng).cwiseAbs(), R = gaussian_matrix(20, 3, 1.0, rng).cwiseAbs();
    DenseMatrix X = L * R.transpose();
    for (Projector p : {Projector::SVD, Projector::RSVD, Projector::VOL_warm, Projector::PVOL_cold}) {
        SchemeConfig cfg;
        cfg.projector = p;
        cfg.rank = 3;
        cfg.max_iters = 5;
        cfg.pvol_rows = 6;
        MatrixRun run = run_scheme(X, cfg);
        ASSERT_EQ(run.trace.rows.size(), 6u);
        for (const auto& r : run.trace.rows) {
            EXPECT_LE(r.neg_fro, 1e-12 * X.norm()) << to_string(p);
            EXPECT_LE((X - run.Y.materialize()).norm(), 1e-9 * X.norm()) << to_string(p);
        }
    }
}

TEST(RunScheme, RejectsBadConfig)
{
    DenseMatrix X = DenseMatrix::Ones(4, 4);
    SchemeConfig cfg;
    cfg.rank = 5;
    EXPECT_THROW(run_scheme(X, cfg), std::invalid_argument);
    cfg.rank = 1;
    cfg.projector = Projector::TTSVD;
    EXPECT_THROW(run_scheme(X, cfg), std::invalid_argument);
}

TEST(RunScheme, ApSvdReducesNegativePart)
{
    const DenseMatrix X = gen_smoluchowski(256, 0.4, 6.0);
    SchemeConfig cfg;
    cfg.rank = 10;
    cfg.max_iters = 50;
    MatrixRun run = run_scheme(X, cfg);
    const auto& rows = run.trace.rows;
    EXPECT_GT(rows.front().neg_fro, 0.0);
    EXPECT_LT(rows.back().neg_fro, 0.1 * rows.front().neg_fro);
    for (size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].neg_fro, rows[k - 1].neg_fro * (1 + 1e-9));
    EXPECT_EQ(rows.front().rel_err, 1.0);
}

TEST(RunScheme, VolWarmStagnates)
{
    const DenseMatrix X = gen_smoluchowski(1024, 0.1, 6.0);
    SchemeConfig cfg;
    cfg.rank = 10;
    cfg.max_iters = 30;
    cfg.projector = Projector::VOL_warm;
    cfg.seed = 4;
    MatrixRun run = run_scheme(X, cfg);
    const auto& rows = run.trace.rows;
    for (size_t k = 2; k < rows.size(); ++k) EXPECT_NEAR(rows[k].neg_fro, rows[1].neg_fro, 1e-12);
}

TEST(Trace, CsvRoundTrip)
{
    IterationTrace t;
    t.rows.push_back({0, 0.5, 0.25, 1.0, 0.0, 3});
    t.rows.push_back({1, 1e-17, 3e-18, 1.0000000000000002, 0.125, 0});
    auto path = std::filesystem::temp_directory_path() / "qap_trace.csv";
    t.write_csv(path.string());
    IterationTrace s = IterationTrace::read_csv(path.string());
    ASSERT_EQ(s.rows.size(), 2u);
    EXPECT_EQ(s.rows[1].neg_fro, 1e-17);
    EXPECT_EQ(s.rows[1].rel_err, 1.0000000000000002);
    EXPECT_EQ(s.rows[0].swaps, 3);
    std::filesystem::remove(path);
}

TEST(RunSchemeTt, NonnegativeExactRankIsFixedPoint)
{
    DenseTensor X({4, 3, 5});
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 3; ++b)
            for (Index c = 0; c < 5; ++c) X.data(X.linear({a, b, c})) = (1.0 + a) * (2.0 + b) * (0.5 + c);
    SchemeConfig cfg;
    cfg.projector = Projector::TTSVD;
    cfg.scheme = Scheme::IP;
    cfg.beta = 0.75;
    cfg.max_iters = 4;
    TensorRun run = run_scheme_tt(X, cfg);
    for (const auto& r : run.trace.rows) {
        EXPECT_EQ(r.neg_fro, 0.0);
        EXPECT_EQ(r.alpha, 0.0);
    }
    EXPECT_LE(tt_frobenius_error(X, run.Y), 1e-12 * X.norm());
}

TEST(RunSchemeTt, MixtureIndentationConvergesInOneStep)
{
    const DenseTensor X = as_qtt(gen_gaussian_mixture(load_mixture()));
    SchemeConfig cfg;
    cfg.projector = Projector::TTSVD;
    cfg.scheme = Scheme::IP;
    cfg.beta = 0.75;
    cfg.max_iters = 1000;
    TensorRun run = run_scheme_tt(X, cfg);
    const auto& rows = run.trace.rows;
    EXPECT_GT(rows[0].neg_fro, 0.0);
    EXPECT_EQ(rows[1].neg_fro, 0.0);
    EXPECT_GE(rows.back().rel_err, 1.30);
    EXPECT_LE(rows.back().rel_err, 1.60);
}

TEST(RunSchemeTt, MixtureShiftErrorGrowth)
{
    const DenseTensor X = as_qtt(gen_gaussian_mixture(load_mixture()));
    SchemeConfig cfg;
    cfg.projector = Projector::TTSVD;
    cfg.scheme = Scheme::SP;
    cfg.beta = 0.5;
    cfg.max_iters = 1000;
    TensorRun run = run_scheme_tt(X, cfg);
    EXPECT_GE(run.trace.rows.back().rel_err, 2.4);
    EXPECT_LE(run.trace.rows.back().rel_err, 3.0);
}
