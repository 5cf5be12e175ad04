#include "qap/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qap {

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::AP: return "ap";
    case Scheme::RP: return "rp";
    case Scheme::SP: return "sp";
    case Scheme::IP: return "ip";
    }
    return "?";
}

std::string to_string(Projector p)
{
    switch (p) {
    case Projector::SVD: return "svd";
    case Projector::RSVD: return "rsvd";
    case Projector::VOL_warm: return "vol_w";
    case Projector::VOL_cold: return "vol_c";
    case Projector::PVOL_warm: return "pvol_w";
    case Projector::PVOL_cold: return "pvol_c";
    case Projector::TTSVD: return "ttsvd";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s)
{
    for (Scheme v : {Scheme::AP, Scheme::RP, Scheme::SP, Scheme::IP})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

Projector parse_projector(const std::string& s)
{
    for (Projector v : {Projector::SVD, Projector::RSVD, Projector::VOL_warm, Projector::VOL_cold,
                        Projector::PVOL_warm, Projector::PVOL_cold, Projector::TTSVD})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown projector '" + s + "'");
}

std::string IterationTrace::to_csv() const
{
    std::ostringstream os;
    os << "iter,neg_fro,neg_max,rel_err,alpha,swaps\n";
    os << std::setprecision(17);
    for (const auto& r : rows)
        os << r.iter << ',' << r.neg_fro << ',' << r.neg_max << ',' << r.rel_err << ',' << r.alpha << ',' << r.swaps << '\n';
    return os.str();
}

void IterationTrace::write_csv(const std::string& path) const
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << to_csv();
}

IterationTrace IterationTrace::read_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    IterationTrace t;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        TraceRow r;
        ls >> r.iter >> r.neg_fro >> r.neg_max >> r.rel_err >> r.alpha >> r.swaps;
        if (!ls) throw std::runtime_error(path + ": bad trace line");
        t.rows.push_back(r);
    }
    return t;
}

Transform constraint_transform(Scheme s, double alpha)
{
    switch (s) {
    case Scheme::AP: return Transform::clamp_nonneg();
    case Scheme::RP: return Transform::abs();
    case Scheme::SP: return Transform::shift(alpha);
    case Scheme::IP: return Transform::indent(alpha);
    }
    return Transform::identity();
}

DenseMatrix constraint_step(const DenseMatrix& Y, Scheme s, double alpha)
{
    Transform t = constraint_transform(s, alpha);
    return Y.unaryExpr([t](double x) { return t(x); });
}

EntryOracle constraint_step(const FactoredMatrix& Y, Scheme s, double alpha)
{
    return EntryOracle::from_factored(Y).then(constraint_transform(s, alpha));
}

double compute_alpha(const DenseMatrix& Y, double beta)
{
    if (beta < 0) throw std::invalid_argument("compute_alpha: beta must be >= 0");
    double mn = Y.size() ? Y.minCoeff() : 0.0;
    return beta * std::max(0.0, -mn);
}

double compute_alpha(const FactoredMatrix& Y, double beta, AlphaMode mode, RngStream& rng)
{
    if (beta < 0) throw std::invalid_argument("compute_alpha: beta must be >= 0");
    if (mode == AlphaMode::Surrogate) {
        MinEntryEstimate e = estimate_min_entry(EntryOracle::from_factored(Y), rng);
        return beta * std::max(0.0, -e.value);
    }
    return compute_alpha(Y.materialize(), beta);
}

namespace {

bool is_cross(Projector p)
{
    return p == Projector::VOL_warm || p == Projector::VOL_cold || p == Projector::PVOL_warm ||
           p == Projector::PVOL_cold;
}

struct MatrixProjector {
    const SchemeConfig& cfg;
    RngStream& rng;
    CrossState state;

    FactoredMatrix dense(const DenseMatrix& Z)
    {
        if (cfg.projector == Projector::SVD) return svd_truncate(Z, cfg.rank);
        if (cfg.projector == Projector::RSVD) return rsvd_truncate(Z, cfg.rank, cfg.rsvd, rng);
        return oracle(EntryOracle::view_dense(Z));
    }

    FactoredMatrix oracle(const EntryOracle& X)
    {
        CrossOptions opt = cfg.cross;
        Index k = cfg.pvol_rows > 0 ? cfg.pvol_rows : 3 * cfg.rank;
        k = std::min({k, X.rows(), X.cols()});
        switch (cfg.projector) {
        case Projector::VOL_warm:
        case Projector::VOL_cold: {
            opt.warm = cfg.projector == Projector::VOL_warm;
            auto [Y, st] = cross_project_vol(X, cfg.rank, state, rng, opt);
            state = st;
            return Y;
        }
        case Projector::PVOL_warm:
        case Projector::PVOL_cold: {
            opt.warm = cfg.projector == Projector::PVOL_warm;
            auto [Y, st] = cross_project_pvol(X, cfg.rank, k, k, state, rng, opt);
            state = st;
            return Y;
        }
        default: throw std::logic_error("oracle projector requested for a dense projector");
        }
    }
};

TraceRow trace_point(Index k, const DenseMatrix& X, const DenseMatrix& Yd, double e0, double alpha, Index swaps)
{
    NegativeNorms nn = negative_part_norms(Yd);
    double e = (X - Yd).norm();
    return TraceRow{k, nn.fro, nn.max, e0 > 0 ? e / e0 : 0.0, alpha, swaps};
}

}  // namespace

MatrixRun run_scheme(const DenseMatrix& X, const SchemeConfig& cfg)
{
    if (cfg.projector == Projector::TTSVD) throw std::invalid_argument("run_scheme: TTSVD needs a tensor input");
    if (cfg.rank < 1 || cfg.rank > std::min(X.rows(), X.cols())) throw std::invalid_argument("run_scheme: bad rank");
    if (cfg.beta < 0) throw std::invalid_argument("run_scheme: beta must be >= 0");
    RngStream rng(cfg.seed);
    MatrixProjector proj{cfg, rng, {}};
    const bool cross = is_cross(cfg.projector);
    AlphaMode mode = cfg.alpha_mode;
    if (mode == AlphaMode::Auto) mode = cross ? AlphaMode::Surrogate : AlphaMode::Exact;

    MatrixRun run;
    run.Y = cfg.y0 ? *cfg.y0 : proj.dense(X);
    DenseMatrix Yd = run.Y.materialize();
    const double e0 = (X - Yd).norm();
    run.trace.rows.push_back(trace_point(0, X, Yd, e0, 0.0, proj.state.swaps));
    proj.state.swaps = 0;

    for (Index k = 1; k <= cfg.max_iters; ++k) {
        try {
            double alpha = 0.0;
            if (cfg.scheme == Scheme::SP || cfg.scheme == Scheme::IP) {
                alpha = mode == AlphaMode::Exact ? compute_alpha(Yd, cfg.beta)
                                                 : compute_alpha(run.Y, cfg.beta, AlphaMode::Surrogate, rng);
            }
            if (cross) {
                run.Y = proj.oracle(constraint_step(run.Y, cfg.scheme, alpha));
            } else {
                run.Y = proj.dense(constraint_step(Yd, cfg.scheme, alpha));
            }
            Yd = run.Y.materialize();
            run.trace.rows.push_back(trace_point(k, X, Yd, e0, alpha, cross ? proj.state.swaps : 0));
        } catch (const std::exception& e) {
            throw NumericalError("iteration " + std::to_string(k) + ": " + e.what());
        }
    }
    return run;
}

TensorRun run_scheme_tt(const DenseTensor& X, const SchemeConfig& cfg)
{
    if (cfg.projector != Projector::TTSVD) throw std::invalid_argument("run_scheme_tt: projector must be TTSVD");
    if (cfg.beta < 0) throw std::invalid_argument("run_scheme_tt: beta must be >= 0");
    TensorRun run;
    run.Y = ttsvd(X, cfg.tt_start);
    const TTTarget fixed = TTTarget::with_ranks(run.Y.ranks());
    DenseTensor Yd = tt_materialize(run.Y);
    const double e0 = (X.data - Yd.data).norm();
    auto point = [&](Index k, double alpha) {
        NegativeNorms nn = negative_part_norms(Yd);
        double e = (X.data - Yd.data).norm();
        return TraceRow{k, nn.fro, nn.max, e0 > 0 ? e / e0 : 0.0, alpha, 0};
    };
    run.trace.rows.push_back(point(0, 0.0));
    for (Index k = 1; k <= cfg.max_iters; ++k) {
        try {
            double alpha = 0.0;
            if (cfg.scheme == Scheme::SP || cfg.scheme == Scheme::IP)
                alpha = cfg.beta * std::max(0.0, -Yd.data.minCoeff());
            Transform t = constraint_transform(cfg.scheme, alpha);
            DenseTensor Z = Yd;
            for (Index i = 0; i < Z.size(); ++i) Z.data(i) = t(Z.data(i));
            run.Y = ttsvd(Z, fixed);
            Yd = tt_materialize(run.Y);
            run.trace.rows.push_back(point(k, alpha));
        } catch (const std::exception& e) {
            throw NumericalError("iteration " + std::to_string(k) + ": " + e.what());
        }
    }
    return run;
}

}  // namespace qap
