#include "qap/cross.hpp"

#include <algorithm>
#include <cmath>

namespace qap {

namespace {

bool same_set(IndexSet a, IndexSet b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// A rank-deficient sample keeps its current index set; the final pivot
// solve then reports the reduced rank.
MaxvolResult guarded(const auto& fn, const IndexSet& fallback)
{
    try {
        return fn();
    } catch (const RankDeficientError&) {
        return MaxvolResult{fallback, 0};
    }
}

DenseMatrix transposed(const DenseMatrix& A) { return A.transpose(); }

}  // namespace

std::pair<FactoredMatrix, CrossState> cross_project_vol(const EntryOracle& X, Index r, const CrossState& state,
                                                        RngStream& rng, const CrossOptions& opt)
{
    const Index m = X.rows(), n = X.cols();
    if (r < 1 || r > std::min(m, n)) throw std::invalid_argument("cross_project_vol: bad rank");
    CrossState st = state;
    st.nu = opt.nu;
    st.Ir.clear();
    st.Jr.clear();
    if (!opt.warm || static_cast<Index>(st.I.size()) != r || static_cast<Index>(st.J.size()) != r) {
        st.J = rng.sample_without_replacement(n, r);
        st.I = rng.sample_without_replacement(m, r);
    }
    st.swaps = 0;
    st.sweeps = 0;

    DenseMatrix C = X.columns(st.J);
    DenseMatrix R;
    for (Index sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        st.sweeps = sweep;
        MaxvolResult ri = guarded([&] { return maxvol(C, st.I, opt.nu); }, st.I);
        st.I = ri.rows;
        R = X.row_set(st.I);
        MaxvolResult rj = guarded([&] { return maxvol(transposed(R), st.J, opt.nu); }, st.J);
        st.swaps += ri.swaps + rj.swaps;
        if (same_set(rj.rows, st.J)) {
            st.J = rj.rows;
            break;
        }
        st.J = rj.rows;
        C = X.columns(st.J);
    }

    DenseMatrix W = C(st.I, Eigen::all);
    DenseMatrix left;
    if (rcond(W) >= 1e-13) {
        left = W.transpose().partialPivLu().solve(C.transpose()).transpose();
        st.effective_rank = r;
    } else {
        SvdResult s = svd(W);
        Index eff = 0;
        for (Index i = 0; i < s.s.size(); ++i)
            if (s.s(i) > 1e-12 * s.s(0) && s.s(i) > 0) ++eff;
        left = C * pseudoinverse(W, 1e-12);
        st.effective_rank = eff;
    }
    return {FactoredMatrix(std::move(left), R.transpose()), st};
}

std::pair<FactoredMatrix, CrossState> cross_project_pvol(const EntryOracle& X, Index r, Index k_r, Index k_c,
                                                         const CrossState& state, RngStream& rng,
                                                         const CrossOptions& opt)
{
    const Index m = X.rows(), n = X.cols();
    if (r < 1 || k_r < r || k_c < r || k_r > m || k_c > n) throw std::invalid_argument("cross_project_pvol: bad sizes");
    CrossState st = state;
    st.nu = opt.nu;
    bool shapes_ok = static_cast<Index>(st.I.size()) == k_r && static_cast<Index>(st.J.size()) == k_c &&
                     static_cast<Index>(st.Ir.size()) == r && static_cast<Index>(st.Jr.size()) == r;
    if (!opt.warm || !shapes_ok) {
        st.I = rng.sample_without_replacement(m, k_r);
        st.J = rng.sample_without_replacement(n, k_c);
        st.Ir.assign(st.I.begin(), st.I.begin() + r);
        st.Jr.assign(st.J.begin(), st.J.begin() + r);
    }
    st.swaps = 0;
    st.sweeps = 0;

    DenseMatrix C, R;
    for (Index sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        st.sweeps = sweep;
        DenseMatrix A1 = X.columns(st.Jr);
        MaxvolResult s1 = guarded([&] { return maxvol_rect(A1, st.I, k_r, opt.nu); }, st.I);
        R = X.row_set(s1.rows);
        MaxvolResult s2 = guarded([&] { return dominant_r(R, st.Jr, opt.nu); }, st.Jr);
        DenseMatrix A3 = X.row_set(st.Ir);
        MaxvolResult s3 = guarded([&] { return maxvol_rect(transposed(A3), st.J, k_c, opt.nu); }, st.J);
        C = X.columns(s3.rows);
        MaxvolResult s4 = guarded([&] { return dominant_r(transposed(C), st.Ir, opt.nu); }, st.Ir);
        st.swaps += s1.swaps + s2.swaps + s3.swaps + s4.swaps;
        bool stable = same_set(s1.rows, st.I) && same_set(s2.rows, st.Jr) && same_set(s3.rows, st.J) &&
                      same_set(s4.rows, st.Ir);
        st.I = s1.rows;
        st.Jr = s2.rows;
        st.J = s3.rows;
        st.Ir = s4.rows;
        if (stable) break;
    }

    DenseMatrix W = C(st.I, Eigen::all);
    SvdResult s = svd_top(W, r);
    DenseMatrix V = s.Vt.transpose();
    Index eff = 0;
    for (Index i = 0; i < r; ++i) {
        if (s.s(i) > 1e-12 * s.s(0) && s.s(i) > 0) {
            V.col(i) /= s.s(i);
            ++eff;
        } else {
            V.col(i).setZero();
        }
    }
    st.effective_rank = eff;
    return {FactoredMatrix(C * V, R.transpose() * s.U), st};
}

MinEntryEstimate estimate_min_entry(const EntryOracle& X, RngStream& rng)
{
    EntryOracle T = X.then(Transform::arccot());
    // arccot squeezes large |x| into a band narrower than any nu > 1.
    CrossOptions opt;
    opt.warm = false;
    opt.nu = 1.0;
    auto [Y, st] = cross_project_vol(T, 1, CrossState{}, rng, opt);
    MinEntryEstimate e;
    e.i = st.I[0];
    e.j = st.J[0];
    e.value = X(e.i, e.j);
    return e;
}

}  // namespace qap
