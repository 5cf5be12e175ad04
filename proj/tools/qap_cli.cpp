#include "qap/experiments.hpp"
#include "qap/generators.hpp"
#include "qap/linalg.hpp"
#include "qap/tt.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace {

int gen(const std::string& what, qap::Scale scale, std::uint64_t seed, const std::string& out)
{
    namespace fs = std::filesystem;
    fs::create_directories(out);
    const bool paper = scale == qap::Scale::Paper;
    qap::RngStream rng(seed);
    if (what == "smoluchowski") {
        auto X = paper ? qap::gen_smoluchowski(1024, 0.1, 6.0) : qap::gen_smoluchowski(256, 0.4, 6.0);
        qap::write_matrix((fs::path(out) / "smoluchowski.qapm").string(), X);
    } else if (what == "mixture") {
        qap::Vector v = qap::gen_gaussian_mixture(qap::load_mixture());
        qap::write_matrix_csv((fs::path(out) / "mixture.csv").string(), qap::DenseMatrix(v));
    } else if (what == "quantized-matrix") {
        for (qap::Index r : {5, 10, 20}) {
            auto q = qap::gen_quantized_matrix(200, r, rng);
            qap::write_matrix((fs::path(out) / ("quantized_r" + std::to_string(r) + ".qapm")).string(), q.X);
        }
    } else if (what == "quantized-tt") {
        for (qap::Index r : {5, 10, 20}) {
            auto q = qap::gen_quantized_tt(paper ? 100 : 40, r, rng);
            qap::write_tt((fs::path(out) / ("quantized_tt_r" + std::to_string(r) + ".qapt")).string(), q.exact);
        }
    } else {
        throw qap::UsageError("unknown dataset '" + what + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quasioptimal alternating projections: datasets and experiments"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string scale = "desk", out = "out";
    int jobs = 1;
    std::string name, dataset;
    long trials = 0, iters = -1;

    auto* g = app.add_subcommand("gen", "write a dataset");
    g->add_option("dataset", dataset, "smoluchowski | mixture | quantized-matrix | quantized-tt")->required();
    auto* r = app.add_subcommand("run", "run a registered experiment");
    r->add_option("name", name, "experiment name")->required();
    r->add_option("--jobs", jobs, "parallel trials")->check(CLI::PositiveNumber);
    r->add_option("--trials", trials, "override the number of trials");
    r->add_option("--iters", iters, "override the iteration budget");
    auto* s = app.add_subcommand("summarize", "recompute summary.csv from stored traces");
    app.add_subcommand("list", "list experiments");
    for (auto* sub : {g, r, s}) {
        sub->add_option("--seed", seed, "base seed");
        sub->add_option("--scale", scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--out", out, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("list")) {
            for (const auto& n : qap::experiment_registry()) std::cout << n << '\n';
            return 0;
        }
        if (g->parsed()) return gen(dataset, qap::parse_scale(scale), seed, out);
        if (s->parsed()) {
            qap::summarize_traces(out);
            return 0;
        }
        qap::ExperimentSpec spec;
        spec.name = name;
        spec.scale = qap::parse_scale(scale);
        spec.seed = seed;
        spec.out_dir = out;
        spec.jobs = jobs;
        if (trials > 0) spec.trials = trials;
        if (iters >= 0) spec.iters = iters;
        qap::ExperimentReport rep = qap::run_experiment(spec);
        for (const auto& c : rep.checks) std::cout << c << '\n';
        for (const auto& t : rep.trials)
            if (!t.ok) std::cout << "trial " << t.id << " failed: " << t.message << '\n';
        return rep.exit_code;
    } catch (const qap::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const qap::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
