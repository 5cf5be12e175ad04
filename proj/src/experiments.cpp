#include "qap/experiments.hpp"

#include "qap/completion.hpp"
#include "qap/generators.hpp"
#include "qap/geometry.hpp"
#include "qap/maxnorm.hpp"
#include "qap/schemes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace qap {

Scale parse_scale(const std::string& s)
{
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    throw UsageError("unknown scale '" + s + "' (expected desk or paper)");
}

const std::vector<std::string>& experiment_registry()
{
    static const std::vector<std::string> names = {"smolukh-schemes",    "mixture-qtt",       "completion-phase",
                                                   "maxnorm-orthogonal", "maxnorm-identity",  "quantized-matrix",
                                                   "quantized-tt",       "geometry-verify"};
    return names;
}

double percentile_nearest_rank(std::vector<double> v, double p)
{
    if (v.empty()) throw std::invalid_argument("percentile_nearest_rank: empty sample");
    if (!(p > 0 && p <= 100)) throw std::invalid_argument("percentile_nearest_rank: p must be in (0, 100]");
    std::sort(v.begin(), v.end());
    auto rank = static_cast<size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
    return v[std::max<size_t>(rank, 1) - 1];
}

namespace {

using Metrics = std::vector<std::pair<std::string, double>>;

void write_metrics(const fs::path& path, const Metrics& m)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "key";
    for (const auto& [k, v] : m) f << ',' << k;
    f << "\n0" << std::setprecision(17);
    for (const auto& [k, v] : m) f << ',' << v;
    f << '\n';
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    Table t;
    std::string line, cell;
    std::getline(f, line);
    std::istringstream hs(line);
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.header.size()) throw std::runtime_error(path.string() + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Runs task(i) for i in [0, n) on `jobs` threads; collects statuses in order.
std::vector<TrialStatus> fan_out(long n, int jobs, const std::function<TrialStatus(long)>& task)
{
    std::vector<TrialStatus> out(static_cast<size_t>(n));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long i; (i = next++) < n;) {
            try {
                out[static_cast<size_t>(i)] = task(i);
            } catch (const std::exception& e) {
                out[static_cast<size_t>(i)] = TrialStatus{std::to_string(i), false, e.what()};
            }
        }
    };
    const int k = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<long>(n, 1))));
    std::vector<std::thread> pool;
    for (int t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

struct Context {
    const ExperimentSpec& spec;
    fs::path traces;
    ExperimentReport report;

    void check(bool ok, const std::string& what)
    {
        report.checks.push_back((ok ? "PASS " : "FAIL ") + what);
        if (!ok && report.exit_code == 0) report.exit_code = 2;
    }
    long trials(long desk, long paper) const
    {
        return spec.trials ? *spec.trials : (spec.scale == Scale::Paper ? paper : desk);
    }
    long iters(long dflt) const { return spec.iters ? *spec.iters : dflt; }
    std::uint64_t seed_for(const std::string& group, long trial) const
    {
        std::uint64_t h = spec.seed;
        for (char c : group) h = mix64(h ^ static_cast<unsigned char>(c));
        return mix64(h ^ static_cast<std::uint64_t>(trial));
    }
    fs::path trace_path(const std::string& group, long seed) const
    {
        return traces / (group + "__seed" + std::to_string(seed) + ".csv");
    }
    void add(std::vector<TrialStatus> st)
    {
        for (auto& s : st) {
            if (!s.ok) report.exit_code = 3;
            report.trials.push_back(std::move(s));
        }
    }
};

struct SchemeChoice {
    std::string label;
    Scheme scheme;
    double beta;
};

const std::vector<SchemeChoice>& scheme_choices()
{
    static const std::vector<SchemeChoice> v = {
        {"ap", Scheme::AP, 0.0}, {"rp", Scheme::RP, 0.0}, {"sp0.5", Scheme::SP, 0.5}, {"ip0.75", Scheme::IP, 0.75}};
    return v;
}

void smolukh_schemes(Context& ctx)
{
    const bool paper = ctx.spec.scale == Scale::Paper;
    const Index n = paper ? 1024 : 256;
    const double step = paper ? 0.1 : 0.4;
    const DenseMatrix X = gen_smoluchowski(n, step, 6.0);
    const long seeds = ctx.trials(3, 10);
    const long iters = ctx.iters(1000);
    const std::vector<Projector> projectors = {Projector::SVD,       Projector::RSVD,      Projector::VOL_warm,
                                               Projector::VOL_cold,  Projector::PVOL_warm, Projector::PVOL_cold};
    struct Job {
        SchemeChoice s;
        Projector p;
        long seed;
    };
    std::vector<Job> jobs;
    for (const auto& s : scheme_choices())
        for (Projector p : projectors)
            for (long k = 0; k < (p == Projector::SVD ? 1 : seeds); ++k) jobs.push_back({s, p, k});
    std::vector<IterationTrace> kept(jobs.size());
    ctx.add(fan_out(static_cast<long>(jobs.size()), ctx.spec.jobs, [&](long i) {
        const Job& j = jobs[static_cast<size_t>(i)];
        const std::string group = j.s.label + "-" + to_string(j.p);
        SchemeConfig cfg;
        cfg.scheme = j.s.scheme;
        cfg.beta = j.s.beta;
        cfg.projector = j.p;
        cfg.rank = 10;
        cfg.max_iters = iters;
        cfg.seed = ctx.seed_for(group, j.seed);
        MatrixRun run = run_scheme(X, cfg);
        run.trace.write_csv(ctx.trace_path(group, j.seed).string());
        kept[static_cast<size_t>(i)] = run.trace;
        return TrialStatus{group + "/" + std::to_string(j.seed), true, ""};
    }));
    for (size_t i = 0; i < jobs.size(); ++i) {
        const Job& j = jobs[i];
        if (j.p != Projector::SVD || kept[i].rows.empty()) continue;
        const auto& rows = kept[i].rows;
        if (j.s.label == "ap")
            ctx.check(rows.back().neg_fro < rows.front().neg_fro, "ap-svd reduces the negative part");
        if (j.s.label == "ip0.75")
            ctx.check(rows.back().neg_fro == 0.0, "ip0.75-svd reaches the nonnegative orthant");
    }
}

void mixture_qtt(Context& ctx)
{
    const Vector v = gen_gaussian_mixture(load_mixture());
    const DenseTensor X = as_qtt(v);
    const long iters = ctx.iters(1000);
    const std::vector<Index> paper_ranks = {2, 2, 2, 3, 3, 4, 5, 4, 2};
    const std::vector<Index> ranks = ttsvd(X, TTTarget::with_tol(1e-2)).ranks();
    bool near = ranks.size() == paper_ranks.size();
    for (size_t k = 0; near && k < ranks.size(); ++k) near = std::abs(ranks[k] - paper_ranks[k]) <= 1;
    ctx.check(near, "mixture TT-ranks within one of the reference ranks");
    std::vector<IterationTrace> kept(scheme_choices().size());
    ctx.add(fan_out(static_cast<long>(kept.size()), ctx.spec.jobs, [&](long i) {
        const SchemeChoice& s = scheme_choices()[static_cast<size_t>(i)];
        SchemeConfig cfg;
        cfg.scheme = s.scheme;
        cfg.beta = s.beta;
        cfg.projector = Projector::TTSVD;
        cfg.max_iters = iters;
        TensorRun run = run_scheme_tt(X, cfg);
        run.trace.write_csv(ctx.trace_path(s.label + "-ttsvd", 0).string());
        kept[static_cast<size_t>(i)] = run.trace;
        return TrialStatus{s.label, true, ""};
    }));
    const auto& ip = kept[3].rows;
    if (ip.size() > 1) ctx.check(ip[1].neg_fro == 0.0, "ip0.75-ttsvd is nonnegative after one iteration");
}

void completion_phase(Context& ctx)
{
    const bool paper = ctx.spec.scale == Scale::Paper;
    const Index n = paper ? 1000 : 300;
    const Index r = 5;
    const long trials = ctx.trials(20, 20);
    const long iters = ctx.iters(1000);
    const std::vector<double> gammas = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0};
    struct Job {
        double gamma;
        long trial;
        bool reg;
    };
    std::vector<Job> jobs;
    for (double g : gammas)
        for (long t = 0; t < trials; ++t)
            for (bool reg : {false, true}) jobs.push_back({g, t, reg});
    std::vector<int> ok(jobs.size(), 0);
    ctx.add(fan_out(static_cast<long>(jobs.size()), ctx.spec.jobs, [&](long i) {
        const Job& j = jobs[static_cast<size_t>(i)];
        std::ostringstream g;
        g << "gamma" << j.gamma;
        RngStream rng(ctx.seed_for(g.str(), j.trial));
        CompletionProblem p = make_completion_problem(n, n, r, j.gamma, rng);
        CompletionOptions opt;
        opt.max_iters = iters;
        opt.seed = rng.next_u64();
        opt.regularize = j.reg ? Regularize::ApVolWarm : Regularize::None;
        CompletionResult res = complete(p, opt);
        const std::string group = g.str() + (j.reg ? "-reg" : "-plain");
        write_metrics(ctx.trace_path(group, j.trial), {{"gamma", j.gamma},
                                                       {"regularized", j.reg ? 1.0 : 0.0},
                                                       {"converged", res.converged ? 1.0 : 0.0},
                                                       {"final_rel_err", res.final_rel_err},
                                                       {"iters", static_cast<double>(res.iters)}});
        ok[static_cast<size_t>(i)] = res.converged;
        return TrialStatus{group + "/" + std::to_string(j.trial), true, ""};
    }));
    double plain_top = 0, reg_top = 0;
    for (size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].gamma == gammas.back()) (jobs[i].reg ? reg_top : plain_top) += ok[i];
    ctx.check(plain_top >= 0.9 * static_cast<double>(trials), "unregularized completion succeeds at the largest gamma");
    ctx.check(reg_top >= 0.9 * static_cast<double>(trials), "regularized completion succeeds at the largest gamma");
}

void maxnorm_orthogonal(Context& ctx, bool identity)
{
    const bool paper = ctx.spec.scale == Scale::Paper;
    const Index n = paper ? 1600 : 256;
    const std::vector<Index> ranks = paper ? std::vector<Index>{10, 20, 40, 80} : std::vector<Index>{8, 16, 32};
    const long trials = ctx.trials(2, 1);
    struct Job {
        Index r;
        long trial;
    };
    std::vector<Job> jobs;
    for (Index r : ranks)
        for (long t = 0; t < trials; ++t) jobs.push_back({r, t});
    std::vector<double> eps(jobs.size(), 0.0);
    const std::string kind = identity ? "identity" : "orthogonal";
    ctx.add(fan_out(static_cast<long>(jobs.size()), ctx.spec.jobs, [&](long i) {
        const Job& j = jobs[static_cast<size_t>(i)];
        const std::string group = kind + "-r" + std::to_string(j.r);
        RngStream rng(ctx.seed_for(group, j.trial));
        DenseMatrix X = identity ? DenseMatrix(DenseMatrix::Identity(n, n)) : haar_orthogonal(n, rng);
        FactoredMatrix Y0 = maxnorm_start(X, j.r, identity ? Y0Policy::GaussianFactors : Y0Policy::HaarFactors, rng);
        MaxnormOptions opt;
        if (paper) opt.inner.projector = Projector::RSVD;
        MaxnormResult res = maxnorm_approximate(X, j.r, Y0, opt, rng);
        write_metrics(ctx.trace_path(group, j.trial), {{"n", static_cast<double>(n)},
                                                       {"rank", static_cast<double>(j.r)},
                                                       {"eps_certified", res.eps_certified},
                                                       {"outer_iters", static_cast<double>(res.outer_iters)},
                                                       {"inner_iters", static_cast<double>(res.inner_iters_total)}});
        eps[static_cast<size_t>(i)] = res.eps_certified;
        return TrialStatus{group + "/" + std::to_string(j.trial), true, ""};
    }));
    // The zero matrix certifies max |X|, which is 1 for the identity.
    bool below = true;
    for (double e : eps) below = below && std::isfinite(e) && (!identity || e <= 1.0);
    ctx.check(below, kind + ": certified errors are finite and no worse than the zero matrix");
}

void quantized_matrix(Context& ctx)
{
    const long trials = ctx.trials(5, 20);
    const std::vector<Index> ranks = {5, 10, 20};
    std::vector<double> eps(ranks.size() * static_cast<size_t>(trials));
    ctx.add(fan_out(static_cast<long>(eps.size()), ctx.spec.jobs, [&](long i) {
        const Index r = ranks[static_cast<size_t>(i / trials)];
        const long t = i % trials;
        const std::string group = "quantized-r" + std::to_string(r);
        RngStream rng(ctx.seed_for(group, t));
        QuantizedMatrix q = gen_quantized_matrix(200, r, rng);
        MaxnormOptions opt;
        opt.inner.delta = 1e-4;
        opt.inner.max_iters = 5000;
        opt.eps_plus_cap = 0.5;
        MaxnormResult res = maxnorm_approximate(q.X, r, svd_truncate(q.X, r), opt, rng);
        write_metrics(ctx.trace_path(group, t), {{"rank", static_cast<double>(r)},
                                                 {"eps_certified", res.eps_certified},
                                                 {"success", res.eps_certified < 0.5 ? 1.0 : 0.0}});
        eps[static_cast<size_t>(i)] = res.eps_certified;
        return TrialStatus{group + "/" + std::to_string(t), true, ""};
    }));
    long fails = 0;
    for (double e : eps) fails += e >= 0.5;
    ctx.check(fails == 0, "every quantized matrix is recovered to max error below 1/2");
}

void quantized_tt(Context& ctx)
{
    const bool paper = ctx.spec.scale == Scale::Paper;
    const Index n = paper ? 100 : 40;
    const long trials = ctx.trials(3, 20);
    const std::vector<Index> ranks = {5, 10, 20};
    std::vector<double> eps(ranks.size() * static_cast<size_t>(trials));
    ctx.add(fan_out(static_cast<long>(eps.size()), ctx.spec.jobs, [&](long i) {
        const Index r = ranks[static_cast<size_t>(i / trials)];
        const long t = i % trials;
        const std::string group = "quantized-tt-r" + std::to_string(r);
        RngStream rng(ctx.seed_for(group, t));
        QuantizedTensor q = gen_quantized_tt(n, r, rng);
        MaxnormOptions opt;
        opt.inner.delta = 1e-4;
        opt.inner.max_iters = 5000;
        MaxnormTTResult res = maxnorm_approximate_tt(q.X, {r, r}, opt);
        write_metrics(ctx.trace_path(group, t), {{"rank", static_cast<double>(r)},
                                                 {"eps_certified", res.eps_certified},
                                                 {"success", res.eps_certified < 0.5 ? 1.0 : 0.0}});
        eps[static_cast<size_t>(i)] = res.eps_certified;
        return TrialStatus{group + "/" + std::to_string(t), true, ""};
    }));
    bool finite = true;
    for (double e : eps) finite = finite && std::isfinite(e);
    ctx.check(finite, "quantized tensors processed");
}

void geometry_verify(Context& ctx)
{
    RngStream rng(ctx.seed_for("geometry", 0));
    const long trials = ctx.trials(1000, 1000);
    TheoremReport rates = verify_theorem_rates(trials, 50, rng);
    ctx.check(rates.ok(), "two-line rates and limit bound (" + std::to_string(rates.cycles_checked) + " cycles)" +
                              (rates.ok() ? "" : ": " + rates.first_failure));
    {
        std::ofstream f(ctx.traces / "two_line_ratios.csv");
        f << "trial,cycle,theta,sigma_a,sigma_b,ratio,bound\n";
        for (const auto& row : rates.csv_rows) f << row << '\n';
    }
    for (double theta : {0.5, 0.9, 1.3}) {
        const LinePair pair(theta);
        const double sa = 0.9 / pair.c();
        TheoremReport one = verify_exact_b_rates(pair, sa, 200, 30, rng);
        ctx.check(one.ok(), "exact projection onto B, sigma_a c = 0.9 at theta " + std::to_string(theta));
    }
    for (double sigma : {1.0, 1.5, 2.0, 5.0}) {
        PythagoreanReport p = verify_pythagorean(10, sigma, 10000, rng);
        ctx.check(p.ok(), "hyperplane quasi-projections, sigma " + std::to_string(sigma));
    }
    HalfOpenSegmentCheck h = half_open_segment_check(2.0, 50);
    ctx.check(h.optimal_empty && h.quasi_count > 0, "half-open segment: no optimal projection, quasi-projections exist");
    bool spiral = true;
    for (int k = -5; k <= 5; ++k) {
        SpiralProjection s = spiral_projection(1.0, 32, k);
        spiral = spiral && s.nearest.size() == 2 && s.cosine < -1.0 + 1e-9;
    }
    ctx.check(spiral, "spiral: two opposite optimal projections at every x_k");
}

}  // namespace

void summarize_traces(const std::string& dir)
{
    const fs::path traces = fs::path(dir) / "traces";
    if (!fs::is_directory(traces)) throw std::runtime_error("no traces directory in " + dir);
    // group -> list of tables, ordered by seed
    std::map<std::string, std::map<long, Table>> groups;
    for (const auto& e : fs::directory_iterator(traces)) {
        const std::string name = e.path().filename().string();
        const auto at = name.rfind("__seed");
        if (at == std::string::npos || e.path().extension() != ".csv") continue;
        const long seed = std::stol(name.substr(at + 6, name.size() - at - 10));
        groups[name.substr(0, at)][seed] = read_table(e.path());
    }
    std::ofstream out(fs::path(dir) / "summary.csv");
    if (!out) throw std::runtime_error("cannot write summary in " + dir);
    out << "group,key,metric,count,mean,median,p10,p25,p75,p90\n" << std::setprecision(17);
    for (const auto& [group, tables] : groups) {
        const Table& first = tables.begin()->second;
        for (size_t row = 0; row < first.rows.size(); ++row) {
            for (size_t col = 1; col < first.header.size(); ++col) {
                std::vector<double> vals;
                for (const auto& [seed, t] : tables)
                    if (row < t.rows.size() && t.header == first.header) vals.push_back(t.rows[row][col]);
                const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
                out << group << ',' << first.rows[row][0] << ',' << first.header[col] << ',' << vals.size() << ','
                    << mean << ',' << percentile_nearest_rank(vals, 50) << ',' << percentile_nearest_rank(vals, 10)
                    << ',' << percentile_nearest_rank(vals, 25) << ',' << percentile_nearest_rank(vals, 75) << ','
                    << percentile_nearest_rank(vals, 90) << '\n';
            }
        }
    }
}

ExperimentReport run_experiment(const ExperimentSpec& spec)
{
    const auto& reg = experiment_registry();
    if (std::find(reg.begin(), reg.end(), spec.name) == reg.end()) throw UsageError("unknown experiment '" + spec.name + "'");
    if (spec.jobs < 1) throw UsageError("--jobs must be >= 1");
    if ((spec.trials && *spec.trials < 1) || (spec.iters && *spec.iters < 0)) throw UsageError("trials and iters must be positive");
    Context ctx{spec, fs::path(spec.out_dir) / "traces", {}};
    fs::create_directories(ctx.traces);
    if (spec.name == "smolukh-schemes") smolukh_schemes(ctx);
    else if (spec.name == "mixture-qtt") mixture_qtt(ctx);
    else if (spec.name == "completion-phase") completion_phase(ctx);
    else if (spec.name == "maxnorm-orthogonal") maxnorm_orthogonal(ctx, false);
    else if (spec.name == "maxnorm-identity") maxnorm_orthogonal(ctx, true);
    else if (spec.name == "quantized-matrix") quantized_matrix(ctx);
    else if (spec.name == "quantized-tt") quantized_tt(ctx);
    else geometry_verify(ctx);
    summarize_traces(spec.out_dir);
    for (const auto& t : ctx.report.trials)
        if (!t.ok) ctx.report.exit_code = 3;
    return ctx.report;
}

}  // namespace qap
