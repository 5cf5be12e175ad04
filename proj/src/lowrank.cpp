#include "qap/lowrank.hpp"

#include "binio.hpp"

#include <atomic>
#include <cmath>

namespace qap {

namespace {
std::atomic<std::uint64_t> g_dense_passes{0};
constexpr Index kBlock = 64;
}  // namespace

std::uint64_t dense_pass_count() { return g_dense_passes.load(); }
void note_dense_pass() { g_dense_passes.fetch_add(1); }

FactoredMatrix::FactoredMatrix(DenseMatrix l, DenseMatrix r) : left(std::move(l)), right(std::move(r))
{
    if (left.cols() != right.cols()) throw std::invalid_argument("FactoredMatrix: factor ranks differ");
}

DenseMatrix FactoredMatrix::materialize() const
{
    note_dense_pass();
    return left * right.transpose();
}

DenseMatrix FactoredMatrix::row_block(Index i0, Index count) const
{
    return left.middleRows(i0, count) * right.transpose();
}

FactoredMatrix svd_truncate(const DenseMatrix& X, Index r)
{
    if (r < 0 || r > std::min(X.rows(), X.cols())) throw std::invalid_argument("svd_truncate: rank exceeds min(m, n)");
    SvdResult s = svd_top(X, r);
    return FactoredMatrix(s.U * s.s.asDiagonal(), s.Vt.transpose());
}

FactoredMatrix rsvd_truncate(const DenseMatrix& X, Index r, const RsvdConfig& cfg, RngStream& rng)
{
    if (cfg.oversampling < 1 || cfg.power_iterations < 0) throw std::invalid_argument("rsvd_truncate: bad config");
    const Index k = r + cfg.oversampling;
    if (r < 0 || k > std::min(X.rows(), X.cols())) throw std::invalid_argument("rsvd_truncate: r + p exceeds min(m, n)");
    DenseMatrix Omega = gaussian_matrix(X.cols(), k, 1.0, rng);
    DenseMatrix Q = qr_orthonormal(X * Omega);
    for (Index it = 0; it < cfg.power_iterations; ++it) {
        DenseMatrix W = qr_orthonormal(X.transpose() * Q);
        Q = qr_orthonormal(X * W);
    }
    DenseMatrix B = Q.transpose() * X;
    FactoredMatrix small = svd_truncate(B, r);
    return FactoredMatrix(Q * small.left, std::move(small.right));
}

double frobenius_error(const DenseMatrix& X, const FactoredMatrix& Y)
{
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw std::invalid_argument("frobenius_error: shape mismatch");
    note_dense_pass();
    double acc = 0.0;
    for (Index i0 = 0; i0 < X.rows(); i0 += kBlock) {
        Index c = std::min(kBlock, X.rows() - i0);
        acc += (X.middleRows(i0, c) - Y.row_block(i0, c)).squaredNorm();
    }
    return std::sqrt(acc);
}

double max_error(const DenseMatrix& X, const FactoredMatrix& Y)
{
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw std::invalid_argument("max_error: shape mismatch");
    note_dense_pass();
    double m = 0.0;
    for (Index i0 = 0; i0 < X.rows(); i0 += kBlock) {
        Index c = std::min(kBlock, X.rows() - i0);
        m = std::max(m, (X.middleRows(i0, c) - Y.row_block(i0, c)).cwiseAbs().maxCoeff());
    }
    return m;
}

NegativeNorms negative_part_norms(const DenseMatrix& Y)
{
    NegativeNorms n;
    double acc = 0.0;
    for (Index i = 0; i < Y.size(); ++i) {
        double v = Y.data()[i];
        if (v < 0) {
            acc += v * v;
            n.max = std::max(n.max, -v);
        }
    }
    n.fro = std::sqrt(acc);
    return n;
}

NegativeNorms negative_part_norms(const FactoredMatrix& Y)
{
    note_dense_pass();
    NegativeNorms n;
    double acc = 0.0;
    for (Index i0 = 0; i0 < Y.rows(); i0 += kBlock) {
        Index c = std::min(kBlock, Y.rows() - i0);
        NegativeNorms b = negative_part_norms(Y.row_block(i0, c));
        acc += b.fro * b.fro;
        n.max = std::max(n.max, b.max);
    }
    n.fro = std::sqrt(acc);
    return n;
}

void write_factored(const std::string& path, const FactoredMatrix& Y)
{
    auto f = detail::open_out(path, "QAPF");
    detail::put_u64(f, static_cast<std::uint64_t>(Y.rows()));
    detail::put_u64(f, static_cast<std::uint64_t>(Y.cols()));
    detail::put_u64(f, static_cast<std::uint64_t>(Y.rank()));
    detail::put_f64(f, Y.left.data(), static_cast<std::size_t>(Y.left.size()));
    detail::put_f64(f, Y.right.data(), static_cast<std::size_t>(Y.right.size()));
}

FactoredMatrix read_factored(const std::string& path)
{
    auto f = detail::open_in(path, "QAPF");
    auto m = static_cast<Index>(detail::get_u64(f));
    auto n = static_cast<Index>(detail::get_u64(f));
    auto r = static_cast<Index>(detail::get_u64(f));
    DenseMatrix L(m, r), R(n, r);
    detail::get_f64(f, L.data(), static_cast<std::size_t>(L.size()));
    detail::get_f64(f, R.data(), static_cast<std::size_t>(R.size()));
    return FactoredMatrix(std::move(L), std::move(R));
}

}  // namespace qap
