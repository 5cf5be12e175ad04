#include "qap/cross.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qap {

namespace {

constexpr double kSingularRcond = 1e-13;
// Relative slack so that entries equal to nu up to rounding do not trigger swaps.
constexpr double kSwapSlack = 1e-12;

void check_set(const IndexSet& s, Index n, const char* who)
{
    std::set<Index> seen;
    for (Index v : s) {
        if (v < 0 || v >= n) throw std::invalid_argument(std::string(who) + ": index out of range");
        if (!seen.insert(v).second) throw std::invalid_argument(std::string(who) + ": duplicate index");
    }
}

bool contains(const IndexSet& s, Index v)
{
    return std::find(s.begin(), s.end(), v) != s.end();
}

DenseMatrix maxvol_coefficients(const DenseMatrix& A, const IndexSet& I)
{
    DenseMatrix Ahat = A(I, Eigen::all);
    DenseMatrix Bt = Ahat.transpose().partialPivLu().solve(A.transpose());
    return Bt.transpose();
}


}  // namespace

IndexSet lu_pivot_rows(const DenseMatrix& A0)
{
    const Index m = A0.rows(), r = A0.cols();
    if (r > m) throw std::invalid_argument("lu_pivot_rows: more columns than rows");
    DenseMatrix A = A0;
    std::vector<char> used(m, 0);
    IndexSet piv;
    const double scale = max_abs(A0);
    for (Index k = 0; k < r; ++k) {
        Index p = -1;
        double best = 0.0;
        for (Index i = 0; i < m; ++i) {
            if (used[i]) continue;
            double a = std::abs(A(i, k));
            if (a > best) {
                best = a;
                p = i;
            }
        }
        if (p < 0 || best <= 1e-14 * scale) {
            for (Index i = 0; i < m && static_cast<Index>(piv.size()) < r; ++i)
                if (!used[i]) {
                    used[i] = 1;
                    piv.push_back(i);
                }
            throw RankDeficientError("lu_pivot_rows: rank " + std::to_string(k) + " < " + std::to_string(r), piv);
        }
        used[p] = 1;
        piv.push_back(p);
        if (k + 1 < r) {
            auto tail = A.rightCols(r - k - 1);
            Eigen::VectorXd l = A.col(k) / A(p, k);
            Eigen::RowVectorXd u = tail.row(p);
            tail.noalias() -= l * u;
        }
    }
    return piv;
}

MaxvolResult maxvol(const DenseMatrix& A, const IndexSet& start_rows, double nu, Index max_swaps)
{
    const Index m = A.rows(), r = A.cols();
    if (r > m) throw std::invalid_argument("maxvol: matrix must be tall");
    if (nu < 1.0) throw std::invalid_argument("maxvol: nu must be >= 1");
    if (static_cast<Index>(start_rows.size()) != r) throw std::invalid_argument("maxvol: need r start rows");
    check_set(start_rows, m, "maxvol");
    if (max_swaps < 0) max_swaps = 10 * m;

    MaxvolResult res;
    res.rows = start_rows;
    if (r == 0) return res;
    if (rcond(A(res.rows, Eigen::all)) < kSingularRcond) res.rows = lu_pivot_rows(A);

    DenseMatrix B = maxvol_coefficients(A, res.rows);
    const double thresh = nu * (1.0 + kSwapSlack);
    while (true) {
        Index i, j;
        double big = B.cwiseAbs().maxCoeff(&i, &j);
        if (!(big > thresh)) break;
        if (res.swaps >= max_swaps)
            throw MaxvolNotConverged("maxvol: no convergence after " + std::to_string(res.swaps) + " swaps", res.rows);
        res.rows[j] = i;
        ++res.swaps;
        if (res.swaps % (2 * r) == 0) {
            B = maxvol_coefficients(A, res.rows);
        } else {
            Eigen::VectorXd bj = B.col(j);
            Eigen::RowVectorXd bi = B.row(i);
            bi(j) -= 1.0;
            B.noalias() -= (bj / B(i, j)) * bi;
        }
    }
    return res;
}

MaxvolResult maxvol_rect(const DenseMatrix& A_in, const IndexSet& start_rows, Index k, double nu, Index max_swaps)
{
    const Index m = A_in.rows(), r = A_in.cols();
    if (k < r || k > m) throw std::invalid_argument("maxvol_rect: need r <= k <= m");
    if (nu < 1.0) throw std::invalid_argument("maxvol_rect: nu must be >= 1");
    check_set(start_rows, m, "maxvol_rect");
    if (max_swaps < 0) max_swaps = 10 * m;
    // Volume ratios do not change under A -> A M, so work with an orthonormal basis.
    const DenseMatrix A = r <= m ? qr_orthonormal(A_in) : A_in;

    MaxvolResult res;
    res.rows = start_rows;
    auto gram = [&](const IndexSet& I) {
        DenseMatrix AI = A(I, Eigen::all);
        return DenseMatrix(AI.transpose() * AI);
    };
    if (static_cast<Index>(res.rows.size()) != k || rcond(gram(res.rows)) < kSingularRcond) {
        // Rebuild: LU pivots, then greedy growth by the largest leverage.
        res.rows = lu_pivot_rows(A);
        while (static_cast<Index>(res.rows.size()) < k) {
            DenseMatrix G = gram(res.rows);
            DenseMatrix Bt = G.llt().solve(A.transpose());
            Eigen::VectorXd lev = (A.transpose().cwiseProduct(Bt)).colwise().sum().transpose();
            Index best = -1;
            double bv = -1.0;
            for (Index j = 0; j < m; ++j) {
                if (contains(res.rows, j)) continue;
                if (lev(j) > bv) {
                    bv = lev(j);
                    best = j;
                }
            }
            res.rows.push_back(best);
        }
    }

    const double thresh = nu * nu * (1.0 + kSwapSlack);
    while (true) {
        DenseMatrix G = gram(res.rows);
        Eigen::LLT<DenseMatrix> llt(G);
        DenseMatrix Bt = llt.solve(A.transpose());  // r x m, columns G^{-1} a_j
        Eigen::VectorXd pdiag = (A.transpose().cwiseProduct(Bt)).colwise().sum().transpose();
        DenseMatrix AI = A(res.rows, Eigen::all);
        DenseMatrix PI = AI * Bt;  // k x m
        double best = 0.0;
        Index bp = -1, bj = -1;
        std::vector<char> in(m, 0);
        for (Index v : res.rows) in[v] = 1;
        for (Index p = 0; p < k; ++p) {
            double pii = pdiag(res.rows[p]);
            for (Index j = 0; j < m; ++j) {
                if (in[j]) continue;
                double ratio = (1.0 + pdiag(j)) * (1.0 - pii) + PI(p, j) * PI(p, j);
                if (ratio > best) {
                    best = ratio;
                    bp = p;
                    bj = j;
                }
            }
        }
        if (!(best > thresh)) break;
        if (res.swaps >= max_swaps)
            throw MaxvolNotConverged("maxvol_rect: no convergence after " + std::to_string(res.swaps) + " swaps",
                                     res.rows);
        IndexSet next = res.rows;
        next[bp] = bj;
        const double before = std::log(std::max(G.determinant(), 1e-300));
        const double after = std::log(std::max(gram(next).determinant(), 1e-300));
        if (!(after > before + 0.5 * std::log(thresh))) break;
        res.rows = std::move(next);
        ++res.swaps;
    }
    return res;
}

MaxvolResult dominant_r(const DenseMatrix& A, const IndexSet& start_cols, double nu, Index max_swaps)
{
    const Index k = A.rows(), n = A.cols(), r = static_cast<Index>(start_cols.size());
    if (r > k || r > n) throw std::invalid_argument("dominant_r: r exceeds matrix dimensions");
    if (nu < 1.0) throw std::invalid_argument("dominant_r: nu must be >= 1");
    check_set(start_cols, n, "dominant_r");
    if (max_swaps < 0) max_swaps = 10 * n;

    MaxvolResult res;
    res.rows = start_cols;
    if (r == 0) return res;
    auto gram = [&](const IndexSet& J) {
        DenseMatrix C = A(Eigen::all, J);
        return DenseMatrix(C.transpose() * C);
    };
    if (rcond(gram(res.rows)) < kSingularRcond) {
        Eigen::ColPivHouseholderQR<DenseMatrix> qr(A);
        if (qr.rank() < r) {
            IndexSet cols;
            for (Index c = 0; c < r; ++c) cols.push_back(qr.colsPermutation().indices()(c));
            throw RankDeficientError("dominant_r: rank " + std::to_string(qr.rank()) + " < " + std::to_string(r), cols);
        }
        res.rows.clear();
        for (Index c = 0; c < r; ++c) res.rows.push_back(qr.colsPermutation().indices()(c));
    }

    const double thresh = nu * nu * (1.0 + kSwapSlack);
    // log of the r-dimensional volume of the selected columns
    auto log_volume = [&](const Eigen::HouseholderQR<DenseMatrix>& qr) {
        return qr.matrixQR().diagonal().head(r).cwiseAbs().array().log().sum();
    };
    Eigen::HouseholderQR<DenseMatrix> qr(DenseMatrix(A(Eigen::all, res.rows)));
    double logvol = log_volume(qr);
    while (true) {
        // With C = QR: T = R^{-1} Q^T A, (C^T C)^{-1}_pp = |row p of R^{-1}|^2.
        const DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(k, r);
        const DenseMatrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        const DenseMatrix Rinv = R.triangularView<Eigen::Upper>().solve(DenseMatrix::Identity(r, r));
        const DenseMatrix QtA = Q.transpose() * A;
        const DenseMatrix T = Rinv * QtA;
        const Eigen::VectorXd rho2 = (A - Q * QtA).colwise().squaredNorm().transpose();
        std::vector<char> in(n, 0);
        for (Index v : res.rows) in[v] = 1;
        double best = 0.0;
        Index bp = -1, bj = -1;
        for (Index p = 0; p < r; ++p) {
            double g = Rinv.row(p).squaredNorm();
            for (Index j = 0; j < n; ++j) {
                if (in[j]) continue;
                double ratio = T(p, j) * T(p, j) + rho2(j) * g;
                if (ratio > best) {
                    best = ratio;
                    bp = p;
                    bj = j;
                }
            }
        }
        if (!(best > thresh)) break;
        if (res.swaps >= max_swaps)
            throw MaxvolNotConverged("dominant_r: no convergence after " + std::to_string(res.swaps) + " swaps",
                                     res.rows);
        IndexSet next = res.rows;
        next[bp] = bj;
        Eigen::HouseholderQR<DenseMatrix> nq(DenseMatrix(A(Eigen::all, next)));
        const double nv = log_volume(nq);
        // The predicted gain is below rounding noise: the set is as dominant as we can tell.
        if (!(nv > logvol + 0.25 * std::log(thresh))) break;
        res.rows = std::move(next);
        qr = std::move(nq);
        logvol = nv;
        ++res.swaps;
    }
    return res;
}

}  // namespace qap
