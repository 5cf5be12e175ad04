#include "qap/completion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qap {

void CompletionProblem::validate() const
{
    if (r < 1 || r > std::min(m, n)) throw std::invalid_argument("CompletionProblem: bad rank");
    if (static_cast<Index>(omega.size()) != observed.size())
        throw std::invalid_argument("CompletionProblem: omega and observed differ in length");
    for (auto [i, j] : omega)
        if (i < 0 || i >= m || j < 0 || j >= n) throw std::invalid_argument("CompletionProblem: index out of range");
    if (X0.rows() != m || X0.cols() != n || X0.rank() != r)
        throw std::invalid_argument("CompletionProblem: X0 has the wrong shape");
}

SamplingSet SamplingSet::from_problem(const CompletionProblem& p)
{
    std::map<std::pair<Index, Index>, double> uniq;
    for (size_t k = 0; k < p.omega.size(); ++k) uniq.emplace(p.omega[k], p.observed(static_cast<Index>(k)));
    SamplingSet s;
    s.values.resize(static_cast<Index>(uniq.size()));
    Index k = 0;
    for (const auto& [ij, v] : uniq) {
        s.rows.push_back(ij.first);
        s.cols.push_back(ij.second);
        s.values(k++) = v;
    }
    return s;
}

ManifoldPoint ManifoldPoint::from_factored(const FactoredMatrix& Y)
{
    Eigen::HouseholderQR<DenseMatrix> ql(Y.left), qr(Y.right);
    const Index r = Y.rank();
    DenseMatrix Ql = ql.householderQ() * DenseMatrix::Identity(Y.rows(), r);
    DenseMatrix Qr = qr.householderQ() * DenseMatrix::Identity(Y.cols(), r);
    DenseMatrix Rl = ql.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    DenseMatrix Rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    SvdResult s = svd(Rl * Rr.transpose());
    return ManifoldPoint{Ql * s.U, s.s, Qr * s.Vt.transpose()};
}

FactoredMatrix ManifoldPoint::factored() const
{
    return FactoredMatrix(U * s.asDiagonal(), V);
}

Vector sparse_residual(const FactoredMatrix& Y, const SamplingSet& S)
{
    Vector g(S.size());
    for (Index k = 0; k < S.size(); ++k) g(k) = Y.entry(S.rows[k], S.cols[k]) - S.values(k);
    return g;
}

Vector sparse_residual(const ManifoldPoint& X, const SamplingSet& S)
{
    DenseMatrix US = X.U * X.s.asDiagonal();
    Vector g(S.size());
    for (Index k = 0; k < S.size(); ++k) g(k) = US.row(S.rows[k]).dot(X.V.row(S.cols[k])) - S.values(k);
    return g;
}

TangentVector tangent_project(const SamplingSet& S, const Vector& g, const ManifoldPoint& X)
{
    const Index r = X.U.cols();
    DenseMatrix GV = DenseMatrix::Zero(X.U.rows(), r);
    DenseMatrix GtU = DenseMatrix::Zero(X.V.rows(), r);
    for (Index k = 0; k < S.size(); ++k) {
        GV.row(S.rows[k]) += g(k) * X.V.row(S.cols[k]);
        GtU.row(S.cols[k]) += g(k) * X.U.row(S.rows[k]);
    }
    TangentVector T;
    T.M = X.U.transpose() * GV;
    T.Up = GV - X.U * T.M;
    T.Vp = GtU - X.V * T.M.transpose();
    return T;
}

Vector tangent_sample(const TangentVector& T, const ManifoldPoint& X, const SamplingSet& S)
{
    DenseMatrix A = X.U * T.M + T.Up;
    Vector v(S.size());
    for (Index k = 0; k < S.size(); ++k)
        v(k) = A.row(S.rows[k]).dot(X.V.row(S.cols[k])) + X.U.row(S.rows[k]).dot(T.Vp.row(S.cols[k]));
    return v;
}

double line_search_step(const TangentVector& T, const ManifoldPoint& X, const SamplingSet& S)
{
    double num = T.squared_norm();
    double den = tangent_sample(T, X, S).squaredNorm();
    if (!(den > 0.0)) throw Stagnation("line_search_step: tangent direction vanishes on the sampled entries");
    return num / den;
}

namespace {

// Orthonormal basis of range(P) that is also orthogonal to U.
DenseMatrix complement_basis(const DenseMatrix& P, const DenseMatrix& U)
{
    DenseMatrix Q = qr_orthonormal(P);
    Q -= U * (U.transpose() * Q);
    return qr_orthonormal(Q);
}

}  // namespace

RetractResult retract(const ManifoldPoint& X, double tau, const TangentVector& T)
{
    const Index r = X.U.cols();
    DenseMatrix Qu = complement_basis(T.Up, X.U);
    DenseMatrix Qv = complement_basis(T.Vp, X.V);
    DenseMatrix Ru = Qu.transpose() * T.Up;
    DenseMatrix Rv = Qv.transpose() * T.Vp;
    DenseMatrix K = DenseMatrix::Zero(2 * r, 2 * r);
    K.topLeftCorner(r, r) = DenseMatrix(X.s.asDiagonal()) - tau * T.M;
    K.topRightCorner(r, r) = -tau * Rv.transpose();
    K.bottomLeftCorner(r, r) = -tau * Ru;
    SvdResult s = svd(K);
    DenseMatrix BU(X.U.rows(), 2 * r), BV(X.V.rows(), 2 * r);
    BU << X.U, Qu;
    BV << X.V, Qv;
    RetractResult out;
    out.X.U = BU * s.U.leftCols(r);
    out.X.s = s.s.head(r);
    out.X.V = BV * s.Vt.topRows(r).transpose();
    out.rank_collapse = !(out.X.s(r - 1) > 0.0);
    return out;
}

double factored_norm(const FactoredMatrix& B)
{
    DenseMatrix a = B.left.transpose() * B.left;
    DenseMatrix b = B.right.transpose() * B.right;
    return std::sqrt(std::max(0.0, a.cwiseProduct(b).sum()));
}

double factored_distance(const ManifoldPoint& A, const FactoredMatrix& B)
{
    double aa = A.s.squaredNorm();
    double bb = std::pow(factored_norm(B), 2);
    DenseMatrix P = (A.U.transpose() * B.left) * (B.right.transpose() * A.V);
    double ab = (A.s.asDiagonal() * P).trace();
    return std::sqrt(std::max(0.0, aa + bb - 2.0 * ab));
}

CompletionResult complete(const CompletionProblem& p, const CompletionOptions& opt)
{
    p.validate();
    SamplingSet S = SamplingSet::from_problem(p);
    RngStream rng(opt.seed);
    ManifoldPoint X = ManifoldPoint::from_factored(p.X0);
    const double obs_norm = S.values.norm();
    const double truth_norm = p.truth ? factored_norm(*p.truth) : 0.0;

    CompletionResult res;
    auto record = [&](Index k, double tau, bool collapse, const Vector& g) {
        CompletionStep st;
        st.iter = k;
        st.tau = tau;
        st.rank_collapse = collapse;
        st.sampled_residual = obs_norm > 0 ? g.norm() / obs_norm : g.norm();
        if (p.truth) st.rel_err = truth_norm > 0 ? factored_distance(X, *p.truth) / truth_norm : factored_distance(X, *p.truth);
        res.history.push_back(st);
        double crit = p.truth ? st.rel_err : st.sampled_residual;
        return crit < opt.success_tol;
    };

    Vector g = sparse_residual(X, S);
    res.converged = record(0, 0.0, false, g);
    for (Index k = 1; k <= opt.max_iters && !res.converged; ++k) {
        TangentVector T = tangent_project(S, g, X);
        double tau;
        try {
            tau = line_search_step(T, X, S);
        } catch (const Stagnation&) {
            break;
        }
        RetractResult rr = retract(X, tau, T);
        X = std::move(rr.X);
        if (opt.regularize == Regularize::ApVolWarm) {
            CrossOptions co = opt.cross;
            co.warm = true;
            CrossState start = opt.persist_cross_state ? res.cross_state : CrossState{};
            EntryOracle o = EntryOracle::from_factored(X.factored()).then(Transform::clamp_nonneg());
            auto [Yc, st] = cross_project_vol(o, p.r, start, rng, co);
            res.cross_state = st;
            X = ManifoldPoint::from_factored(Yc);
        }
        res.iters = k;
        g = sparse_residual(X, S);
        res.converged = record(k, tau, rr.rank_collapse, g);
    }
    res.Y = X.factored();
    res.final_rel_err = res.history.back().rel_err;
    return res;
}

CompletionProblem make_completion_problem(Index m, Index n, Index r, double gamma, RngStream& rng)
{
    CompletionProblem p;
    p.m = m;
    p.n = n;
    p.r = r;
    const double hi = 1.0 / std::sqrt(static_cast<double>(n));
    DenseMatrix L(m, r), R(n, r);
    for (Index i = 0; i < L.size(); ++i) L.data()[i] = rng.uniform(0.0, hi);
    for (Index i = 0; i < R.size(); ++i) R.data()[i] = rng.uniform(0.0, hi);
    p.truth = FactoredMatrix(std::move(L), std::move(R));
    const auto count = static_cast<Index>(std::llround(gamma * static_cast<double>(r * (m + n - r))));
    p.omega.reserve(count);
    p.observed.resize(count);
    for (Index k = 0; k < count; ++k) {
        Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
        Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        p.omega.emplace_back(i, j);
        p.observed(k) = p.truth->entry(i, j);
    }
    DenseMatrix A = haar_columns(m, r, rng);
    DenseMatrix B = haar_columns(n, r, rng);
    p.X0 = FactoredMatrix(std::move(A), std::move(B));
    return p;
}

}  // namespace qap
