#include "qap/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace qap {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t RngStream::next_u64()
{
    std::uint64_t key = mix64(seed_);
    return mix64(key ^ mix64(counter_++ * 0xD1B54A32D192ED03ULL));
}

double RngStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b)
{
    return a + (b - a) * uniform();
}

double RngStream::normal()
{
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(th);
    have_spare_ = true;
    return rad * std::cos(th);
}

std::uint64_t RngStream::below(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

RngStream RngStream::split(std::uint64_t id) const
{
    return RngStream(mix64(mix64(seed_) ^ mix64(id + 0x632BE59BD9B4E019ULL)));
}

IndexSet RngStream::sample_without_replacement(Index n, Index k)
{
    if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: k out of range");
    IndexSet out;
    out.reserve(k);
    if (4 * k >= n) {
        IndexSet perm(n);
        for (Index i = 0; i < n; ++i) perm[i] = i;
        for (Index i = 0; i < k; ++i) {
            Index j = i + static_cast<Index>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(perm[i], perm[j]);
            out.push_back(perm[i]);
        }
        return out;
    }
    std::unordered_set<Index> seen;
    while (static_cast<Index>(out.size()) < k) {
        Index j = static_cast<Index>(below(static_cast<std::uint64_t>(n)));
        if (seen.insert(j).second) out.push_back(j);
    }
    return out;
}

namespace {

void fix_signs(SvdResult& r)
{
    for (Index j = 0; j < r.U.cols(); ++j) {
        Index imax = 0;
        double best = -1.0;
        for (Index i = 0; i < r.U.rows(); ++i) {
            double a = std::abs(r.U(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (r.U(imax, j) < 0.0) {
            r.U.col(j) *= -1.0;
            r.Vt.row(j) *= -1.0;
        }
    }
}

// The row-major buffer of X (m x n) is the column-major buffer of X^T, so
// LAPACK sees X^T = V S U^T and hands back Vt and U already in row-major form.
SvdResult lapack_svd(const DenseMatrix& X, Index k, bool partial)
{
    const lapack_int m = static_cast<lapack_int>(X.rows());
    const lapack_int n = static_cast<lapack_int>(X.cols());
    const lapack_int mn = std::min(m, n);
    SvdResult r;
    if (mn == 0 || k == 0) {
        r.U = DenseMatrix::Zero(m, k);
        r.s = Vector::Zero(k);
        r.Vt = DenseMatrix::Zero(k, n);
        return r;
    }
    std::vector<double> a(X.data(), X.data() + X.size());
    std::vector<double> s(mn);
    lapack_int info = 0;
    if (!partial) {
        std::vector<double> vt(static_cast<size_t>(n) * mn);
        std::vector<double> u(static_cast<size_t>(mn) * m);
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, m, a.data(), n, s.data(), vt.data(), n, u.data(), mn);
        if (info != 0) throw NumericalError("svd: dgesdd failed, info = " + std::to_string(info));
        r.Vt = Eigen::Map<DenseMatrix>(vt.data(), mn, n).topRows(k);
        r.U = Eigen::Map<DenseMatrix>(u.data(), m, mn).leftCols(k);
        r.s = Eigen::Map<Vector>(s.data(), mn).head(k);
    } else {
        lapack_int kk = static_cast<lapack_int>(k);
        lapack_int ns = 0;
        std::vector<double> vt(static_cast<size_t>(n) * kk);
        std::vector<double> u(static_cast<size_t>(kk) * m);
        std::vector<lapack_int> superb(12 * static_cast<size_t>(mn));
        info = LAPACKE_dgesvdx(LAPACK_COL_MAJOR, 'V', 'V', 'I', n, m, a.data(), n, 0.0, 0.0, 1, kk, &ns, s.data(),
                               vt.data(), n, u.data(), kk, superb.data());
        if (info != 0) throw NumericalError("svd: dgesvdx failed, info = " + std::to_string(info));
        if (ns != kk) throw NumericalError("svd: dgesvdx returned " + std::to_string(ns) + " of " + std::to_string(kk) + " triplets");
        r.Vt = Eigen::Map<DenseMatrix>(vt.data(), kk, n);
        r.U = Eigen::Map<DenseMatrix>(u.data(), m, kk);
        r.s = Eigen::Map<Vector>(s.data(), kk);
    }
    for (Index i = 0; i < r.s.size(); ++i) {
        if (!std::isfinite(r.s(i))) throw NumericalError("svd: non-finite singular value");
    }
    fix_signs(r);
    return r;
}

}  // namespace

SvdResult svd(const DenseMatrix& X)
{
    return lapack_svd(X, std::min(X.rows(), X.cols()), false);
}

SvdResult svd_top(const DenseMatrix& X, Index k)
{
    const Index m = X.rows(), n = X.cols(), mn = std::min(m, n);
    if (k < 0 || k > mn) throw std::invalid_argument("svd_top: k out of range");
    if (3 * k >= mn || mn < 16) return lapack_svd(X, k, false);
    // dgesvdx compresses strongly rectangular input with its own QR/LQ step.
    return lapack_svd(X, k, true);
}

DenseMatrix qr_orthonormal(const DenseMatrix& X)
{
    if (X.rows() < X.cols()) throw std::invalid_argument("qr_orthonormal: needs rows >= cols");
    Eigen::HouseholderQR<DenseMatrix> qr(X);
    return qr.householderQ() * DenseMatrix::Identity(X.rows(), X.cols());
}

DenseMatrix pseudoinverse(const DenseMatrix& X, double rank_tol)
{
    if (rank_tol < 0) throw std::invalid_argument("pseudoinverse: rank_tol must be >= 0");
    SvdResult s = svd(X);
    DenseMatrix P = DenseMatrix::Zero(X.cols(), X.rows());
    if (s.s.size() == 0) return P;
    double cut = rank_tol * s.s(0);
    for (Index i = 0; i < s.s.size(); ++i) {
        if (s.s(i) <= cut || s.s(i) == 0.0) break;
        P.noalias() += (s.Vt.row(i).transpose() / s.s(i)) * s.U.col(i).transpose();
    }
    return P;
}

DenseMatrix gaussian_matrix(Index m, Index n, double stddev, RngStream& rng)
{
    if (!(stddev > 0)) throw std::invalid_argument("gaussian_matrix: stddev must be positive");
    DenseMatrix G(m, n);
    for (Index i = 0; i < G.size(); ++i) G.data()[i] = stddev * rng.normal();
    return G;
}

DenseMatrix haar_columns(Index n, Index r, RngStream& rng)
{
    if (n < 1 || r < 0 || r > n) throw std::invalid_argument("haar_columns: bad shape");
    DenseMatrix G = gaussian_matrix(n, r, 1.0, rng);
    Eigen::HouseholderQR<DenseMatrix> qr(G);
    DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(n, r);
    const DenseMatrix& R = qr.matrixQR();
    for (Index j = 0; j < r; ++j) {
        if (R(j, j) < 0) Q.col(j) *= -1.0;
    }
    return Q;
}

DenseMatrix haar_orthogonal(Index n, RngStream& rng)
{
    return haar_columns(n, n, rng);
}

double rcond(const DenseMatrix& M)
{
    if (M.rows() != M.cols()) throw std::invalid_argument("rcond: matrix must be square");
    if (M.rows() == 0) return 1.0;
    if (!M.allFinite()) return 0.0;
    Vector s = svd(M).s;
    return s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
}

double max_abs(const DenseMatrix& X)
{
    return X.size() == 0 ? 0.0 : X.cwiseAbs().maxCoeff();
}

}  // namespace qap
