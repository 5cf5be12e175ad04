#include "qap/experiments.hpp"
#include "qap/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(BesselI0, MatchesLibrary)
{
    for (double z : {0.0, 1e-8, 0.3, 2.0, 7.5, 14.99, 15.0, 15.01, 22.0, 29.99}) {
        const double ref = std::exp(-z) * std::cyl_bessel_i(0.0, z);
        EXPECT_NEAR(bessel_i0_scaled(z), ref, 1e-14 * ref) << z;
    }
    EXPECT_EQ(bessel_i0_scaled(0.0), 1.0);
    EXPECT_THROW(bessel_i0_scaled(-1.0), std::domain_error);
}

TEST(BesselI0, FrozenScaledValues)
{
    // Reference values from an independent scaled Bessel implementation.
    const std::pair<double, double> ref[] = {
        {0.5, 0.64503527044915},       {5.0, 0.18354081260932834},   {14.9, 0.10425387282429126},
        {15.1, 0.1035487812057697},    {29.9, 0.07326921904600191},  {30.1, 0.07302329413106094},
        {100.0, 0.03994437929909668},  {700.0, 0.015081295651531355},
    };
    for (auto [z, v] : ref) EXPECT_NEAR(bessel_i0_scaled(z), v, 1e-14 * v) << z;
}

TEST(Smoluchowski, ReferenceBlock)
{
    const DenseMatrix X = gen_smoluchowski(4, 0.4, 6.0);
    const double row0[] = {0.0625, 0.04189500287722746, 0.02808306025732635, 0.01882463824451263};
    const double row1[] = {0.04189500287722746, 0.03155548465061561, 0.02362096435281965, 0.01758677140479592};
    for (Index j = 0; j < 4; ++j) {
        EXPECT_NEAR(X(0, j), row0[j], 1e-15);
        EXPECT_NEAR(X(1, j), row1[j], 1e-15);
    }
    EXPECT_EQ(X(0, 0), 0.0625);
    EXPECT_LT((X - X.transpose()).norm(), 1e-17);
}

TEST(Smoluchowski, TimeZeroIsRankOne)
{
    const DenseMatrix X = gen_smoluchowski(50, 0.1, 0.0);
    for (Index i = 0; i < 50; ++i)
        for (Index j = 0; j < 50; ++j) EXPECT_NEAR(X(i, j), std::exp(-0.1 * static_cast<double>(i + j)), 1e-15);
    SvdResult s = svd(X);
    EXPECT_LT(s.s(1), 1e-13 * s.s(0));
    EXPECT_THROW(gen_smoluchowski(0, 0.1, 1.0), std::invalid_argument);
}

TEST(Smoluchowski, PerronFrobenius)
{
    const DenseMatrix X = gen_smoluchowski(1024, 0.1, 6.0);
    EXPECT_GT(X.minCoeff(), 0.0);
    EXPECT_EQ(negative_part_norms(svd_truncate(X, 1)).fro, 0.0);
    for (Index r = 2; r <= 10; ++r) EXPECT_GT(negative_part_norms(svd_truncate(X, r)).fro, 0.0) << r;
}

TEST(GaussianMixture, NonnegativeWithMass)
{
    const MixtureSpec spec = load_mixture();
    EXPECT_EQ(spec.length, 1024);
    const Vector v = gen_gaussian_mixture(spec);
    ASSERT_EQ(v.size(), 1024);
    EXPECT_GE(v.minCoeff(), 0.0);
    double weights = 0.0;
    for (const auto& c : spec.components) weights += c.weight;
    // Riemann sum of the density on the unit grid.
    EXPECT_GT(v.sum() / 1024.0, 0.0);
    EXPECT_NEAR(v.sum() / 1024.0, weights, 0.05 * weights);
    EXPECT_THROW(load_mixture("/nonexistent/mixture.json"), std::runtime_error);
}

TEST(Quantized, MatrixGenerator)
{
    RngStream rng(1);
    QuantizedMatrix z = gen_quantized_matrix(10, 0, rng);
    EXPECT_EQ(z.X, DenseMatrix::Zero(10, 10));

    QuantizedMatrix q = gen_quantized_matrix(200, 5, rng);
    DenseMatrix U = q.exact.materialize();
    SvdResult s = svd(U);
    EXPECT_GT(s.s(4), 1e-8 * s.s(0));
    EXPECT_LT(s.s(5), 1e-12 * s.s(0));
    EXPECT_LE(max_abs(q.X - U), 0.5);
    EXPECT_EQ(q.X, q.X.array().round().matrix());

    RngStream a(3), b(3);
    EXPECT_EQ(gen_quantized_matrix(20, 2, a).X, gen_quantized_matrix(20, 2, b).X);
}

TEST(Quantized, TensorGenerator)
{
    RngStream rng(2);
    QuantizedTensor z = gen_quantized_tt(6, 0, rng);
    EXPECT_EQ(z.X.data.cwiseAbs().maxCoeff(), 0.0);

    QuantizedTensor q = gen_quantized_tt(12, 3, rng);
    DenseTensor E = tt_materialize(q.exact);
    for (Index split : {1, 2}) {
        SvdResult s = svd(unfolding(E, split));
        EXPECT_GT(s.s(2), 1e-8 * s.s(0));
        EXPECT_LT(s.s(3), 1e-12 * s.s(0));
    }
    EXPECT_LE((q.X.data - E.data).cwiseAbs().maxCoeff(), 0.5);
}

TEST(Percentile, NearestRank)
{
    EXPECT_EQ(percentile_nearest_rank({3, 1, 2, 4}, 50), 2.0);
    EXPECT_EQ(percentile_nearest_rank({3, 1, 2, 4}, 25), 1.0);
    EXPECT_EQ(percentile_nearest_rank({3, 1, 2, 4}, 100), 4.0);
    EXPECT_EQ(percentile_nearest_rank({5}, 10), 5.0);
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i);
    EXPECT_EQ(percentile_nearest_rank(v, 10), 1.0);
    EXPECT_EQ(percentile_nearest_rank(v, 11), 2.0);
    EXPECT_EQ(percentile_nearest_rank(v, 90), 9.0);
    EXPECT_THROW(percentile_nearest_rank({}, 50), std::invalid_argument);
}

TEST(Registry, NamesAndUsage)
{
    const auto& names = experiment_registry();
    const std::vector<std::string> expect = {"smolukh-schemes",    "mixture-qtt",      "completion-phase",
                                             "maxnorm-orthogonal", "maxnorm-identity", "quantized-matrix",
                                             "quantized-tt",       "geometry-verify"};
    EXPECT_EQ(names, expect);
    ExperimentSpec bad;
    bad.name = "nope";
    EXPECT_THROW(run_experiment(bad), UsageError);
    EXPECT_EQ(parse_scale("desk"), Scale::Desk);
    EXPECT_EQ(parse_scale("paper"), Scale::Paper);
    EXPECT_THROW(parse_scale("huge"), UsageError);
}

TEST(RunExperiment, GeometryVerifyPasses)
{
    ExperimentSpec spec;
    spec.name = "geometry-verify";
    spec.out_dir = (fs::temp_directory_path() / "qap_geometry_run").string();
    fs::remove_all(spec.out_dir);
    ExperimentReport rep = run_experiment(spec);
    EXPECT_EQ(rep.exit_code, 0);
    ASSERT_FALSE(rep.checks.empty());
    for (const auto& c : rep.checks) EXPECT_EQ(c.rfind("PASS", 0), 0u) << c;
    EXPECT_TRUE(fs::exists(fs::path(spec.out_dir) / "traces" / "two_line_ratios.csv"));
    fs::remove_all(spec.out_dir);
}

TEST(RunExperiment, SummaryRecomputesBitIdentically)
{
    ExperimentSpec spec;
    spec.name = "mixture-qtt";
    spec.out_dir = (fs::temp_directory_path() / "qap_mixture_run").string();
    spec.iters = 20;
    fs::remove_all(spec.out_dir);
    ExperimentReport rep = run_experiment(spec);
    const fs::path summary = fs::path(spec.out_dir) / "summary.csv";
    ASSERT_TRUE(fs::exists(summary));
    const std::string first = slurp(summary);
    EXPECT_FALSE(first.empty());
    fs::remove(summary);
    summarize_traces(spec.out_dir);
    EXPECT_EQ(slurp(summary), first);
    fs::remove_all(spec.out_dir);
}

TEST(RunExperiment, SameSeedSameTraces)
{
    auto run = [](const std::string& dir) {
        ExperimentSpec spec;
        spec.name = "smolukh-schemes";
        spec.out_dir = dir;
        spec.trials = 1;
        spec.iters = 5;
        spec.jobs = 2;
        fs::remove_all(dir);
        run_experiment(spec);
        return slurp(fs::path(dir) / "summary.csv");
    };
    const fs::path base = fs::temp_directory_path();
    const std::string a = run((base / "qap_det_a").string()), b = run((base / "qap_det_b").string());
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    fs::remove_all(base / "qap_det_a");
    fs::remove_all(base / "qap_det_b");
}
