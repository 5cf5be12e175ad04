#include "qap/maxnorm.hpp"

#include <cmath>

namespace qap {

namespace {

// Entries inside the ball are kept as is; clipped ones are nudged so that
// the rounded difference stays within eps.
double clip_entry(double y, double x, double eps)
{
    if (std::abs(y - x) <= eps) return y;
    const double toward = y > x ? x + eps : x - eps;
    double v = toward;
    while (std::abs(v - x) > eps) v = std::nextafter(v, x);
    return v;
}

}  // namespace

DenseMatrix ball_project(const DenseMatrix& Y, const DenseMatrix& X, double eps)
{
    if (eps < 0) throw std::invalid_argument("ball_project: eps must be >= 0");
    if (Y.rows() != X.rows() || Y.cols() != X.cols()) throw std::invalid_argument("ball_project: shape mismatch");
    DenseMatrix P(Y.rows(), Y.cols());
    for (Index i = 0; i < Y.size(); ++i) P.data()[i] = clip_entry(Y.data()[i], X.data()[i], eps);
    return P;
}

Vector ball_project(const Vector& Y, const Vector& X, double eps)
{
    if (eps < 0) throw std::invalid_argument("ball_project: eps must be >= 0");
    if (Y.size() != X.size()) throw std::invalid_argument("ball_project: shape mismatch");
    Vector P(Y.size());
    for (Index i = 0; i < Y.size(); ++i) P(i) = clip_entry(Y(i), X(i), eps);
    return P;
}

InnerResult inner_ap(const DenseMatrix& X, Index r, double eps, const FactoredMatrix& Y0, const InnerOptions& opt,
                     RngStream& rng)
{
    if (!(opt.delta > 0)) throw std::invalid_argument("inner_ap: delta must be positive");
    InnerResult res;
    res.Y = Y0;
    DenseMatrix Yd = Y0.materialize();
    res.err_max = max_abs(X - Yd);
    res.errors.push_back(res.err_max);
    for (Index k = 1; k <= opt.max_iters; ++k) {
        DenseMatrix Z = ball_project(Yd, X, eps);
        res.Y = opt.projector == Projector::RSVD ? rsvd_truncate(Z, r, opt.rsvd, rng) : svd_truncate(Z, r);
        Yd = res.Y.materialize();
        double e = max_abs(X - Yd);
        double prev = res.err_max;
        res.err_max = e;
        res.errors.push_back(e);
        res.iters = k;
        if (prev < (1.0 + opt.delta) * e) break;
    }
    return res;
}

namespace {

// Shrinking-interval search shared by the matrix and tensor versions.
// inner(eps, warm) returns the next object and its max-norm error.
template <class Obj, class Inner>
void interval_search(Obj& best, double& eps_plus, Obj warm, const MaxnormOptions& opt, Index& outer, Index& inner_total,
                     Inner inner)
{
    double hi = opt.eps_plus_cap ? std::min(eps_plus, *opt.eps_plus_cap) : eps_plus;
    double lo = 0.0;
    const double stop = opt.interval_stop > 0 ? opt.interval_stop : 1e-3 * hi;
    if (!(hi > 0)) return;
    while (hi - lo >= stop) {
        double eps = 0.5 * (lo + hi);
        auto [obj, err, iters] = inner(eps, warm);
        ++outer;
        inner_total += iters;
        warm = obj;
        if (err < eps_plus) {
            eps_plus = err;
            best = obj;
        }
        hi = std::min(hi, err);
        lo += (hi - lo) / 10.0;
    }
}

}  // namespace

MaxnormResult maxnorm_approximate(const DenseMatrix& X, Index r, const FactoredMatrix& Y0, const MaxnormOptions& opt,
                                  RngStream& rng)
{
    MaxnormResult res;
    res.Y = Y0;
    res.eps_certified = max_abs(X - Y0.materialize());
    if (res.eps_certified <= 1e-12 * max_abs(X)) return res;
    interval_search(res.Y, res.eps_certified, Y0, opt, res.outer_iters, res.inner_iters_total,
                    [&](double eps, const FactoredMatrix& warm) {
                        InnerResult in = inner_ap(X, r, eps, warm, opt.inner, rng);
                        return std::tuple{in.Y, in.err_max, in.iters};
                    });
    return res;
}

MaxnormTTResult maxnorm_approximate_tt(const DenseTensor& X, const std::vector<Index>& ranks, const MaxnormOptions& opt)
{
    if (!(opt.inner.delta > 0)) throw std::invalid_argument("maxnorm_approximate_tt: delta must be positive");
    const TTTarget target = TTTarget::with_ranks(ranks);
    MaxnormTTResult res;
    res.Y = ttsvd(X, target);
    Vector Y0d = tt_materialize(res.Y).data;
    res.eps_certified = (X.data - Y0d).cwiseAbs().maxCoeff();
    if (res.eps_certified <= 1e-12 * X.data.cwiseAbs().maxCoeff()) return res;

    struct Iterate {
        TTTensor tt;
        Vector dense;
    };
    Iterate best{res.Y, Y0d};
    interval_search(best, res.eps_certified, best, opt, res.outer_iters, res.inner_iters_total,
                    [&](double eps, const Iterate& warm) {
                        Iterate cur = warm;
                        double err = (X.data - cur.dense).cwiseAbs().maxCoeff();
                        Index k = 0;
                        while (k < opt.inner.max_iters) {
                            ++k;
                            DenseTensor Z(X.dims, ball_project(cur.dense, X.data, eps));
                            cur.tt = ttsvd(Z, target);
                            cur.dense = tt_materialize(cur.tt).data;
                            double e = (X.data - cur.dense).cwiseAbs().maxCoeff();
                            double prev = err;
                            err = e;
                            if (prev < (1.0 + opt.inner.delta) * e) break;
                        }
                        return std::tuple{cur, err, k};
                    });
    res.Y = best.tt;
    return res;
}

FactoredMatrix maxnorm_start(const DenseMatrix& X, Index r, Y0Policy policy, RngStream& rng)
{
    switch (policy) {
    case Y0Policy::Svd: return svd_truncate(X, r);
    case Y0Policy::HaarFactors: {
        DenseMatrix A = haar_columns(X.rows(), r, rng);
        DenseMatrix B = haar_columns(X.cols(), r, rng);
        return FactoredMatrix(std::move(A), std::move(B));
    }
    case Y0Policy::GaussianFactors: {
        double sd = 1.0 / std::sqrt(static_cast<double>(r));
        DenseMatrix A = gaussian_matrix(X.rows(), r, sd, rng);
        DenseMatrix B = gaussian_matrix(X.cols(), r, sd, rng);
        return FactoredMatrix(std::move(A), std::move(B));
    }
    }
    throw std::invalid_argument("maxnorm_start: unknown policy");
}

std::uint64_t udell_rank(std::uint64_t n, double eps)
{
    if (n < 1 || !(eps > 0 && eps <= 1)) throw std::invalid_argument("udell_rank: need n >= 1 and eps in (0, 1]");
    return static_cast<std::uint64_t>(std::ceil(72.0 * std::log(1.0 + 2.0 * static_cast<double>(n)) / (eps * eps)));
}

}  // namespace qap
