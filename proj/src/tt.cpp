#include "qap/tt.hpp"

#include "binio.hpp"

#include <cmath>
#include <numeric>

namespace qap {

namespace {

Index product(const std::vector<Index>& d, size_t b, size_t e)
{
    Index p = 1;
    for (size_t k = b; k < e; ++k) p *= d[k];
    return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> d) : dims(std::move(d))
{
    data = Vector::Zero(product(dims, 0, dims.size()));
}

DenseTensor::DenseTensor(std::vector<Index> d, Vector v) : dims(std::move(d)), data(std::move(v))
{
    if (data.size() != product(dims, 0, dims.size())) throw std::invalid_argument("DenseTensor: size mismatch");
}

Index DenseTensor::linear(const std::vector<Index>& idx) const
{
    if (idx.size() != dims.size()) throw std::invalid_argument("DenseTensor: wrong index order");
    Index p = 0;
    for (size_t k = 0; k < dims.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= dims[k]) throw std::out_of_range("DenseTensor: index out of range");
        p = p * dims[k] + idx[k];
    }
    return p;
}

std::vector<Index> TTTensor::ranks() const
{
    std::vector<Index> r;
    for (size_t k = 0; k + 1 < cores.size(); ++k) r.push_back(cores[k].cols());
    return r;
}

void TTTensor::validate() const
{
    if (dims.size() != cores.size() || dims.empty()) throw std::invalid_argument("TTTensor: core count mismatch");
    Index r = 1;
    for (size_t k = 0; k < cores.size(); ++k) {
        if (cores[k].rows() != r * dims[k]) throw std::invalid_argument("TTTensor: rank chain broken at core " + std::to_string(k));
        r = cores[k].cols();
    }
    if (r != 1) throw std::invalid_argument("TTTensor: last rank must be 1");
}

DenseMatrix unfolding(const DenseTensor& X, Index split)
{
    Index rows = product(X.dims, 0, static_cast<size_t>(split));
    Index cols = X.size() / std::max<Index>(rows, 1);
    return Eigen::Map<const DenseMatrix>(X.data.data(), rows, cols);
}

TTSvdResult ttsvd_full(const DenseTensor& X, const TTTarget& target)
{
    const Index d = X.order();
    if (d < 1) throw std::invalid_argument("ttsvd: empty tensor");
    if (!target.tol && static_cast<Index>(target.ranks.size()) != d - 1)
        throw std::invalid_argument("ttsvd: need d-1 ranks");
    if (target.tol && !(*target.tol > 0.0 && *target.tol < 1.0))
        throw std::invalid_argument("ttsvd: tolerance must lie in (0, 1)");

    TTSvdResult out;
    out.tt.dims = X.dims;
    const double delta = target.tol && d > 1 ? *target.tol * X.norm() / std::sqrt(static_cast<double>(d - 1)) : 0.0;

    DenseMatrix C = Eigen::Map<const DenseMatrix>(X.data.data(), 1, X.size());
    Index r = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        const Index rows = r * X.dims[k];
        const Index cols = C.size() / rows;
        DenseMatrix M = Eigen::Map<const DenseMatrix>(C.data(), rows, cols);
        const double total = M.squaredNorm();
        SvdResult s;
        Index rr;
        if (target.tol) {
            s = svd(M);
            const Index full = s.s.size();
            rr = full;
            double tail = 0.0;
            // Smallest rank whose discarded tail fits into delta.
            for (Index cand = full - 1; cand >= 1; --cand) {
                tail += s.s(cand) * s.s(cand);
                if (std::sqrt(tail) > delta) break;
                rr = cand;
            }
            rr = std::max<Index>(rr, 1);
            s.U.conservativeResize(Eigen::NoChange, rr);
            s.s.conservativeResize(rr);
            s.Vt.conservativeResize(rr, Eigen::NoChange);
        } else {
            rr = target.ranks[k];
            if (rr < 1 || rr > std::min(rows, cols))
                throw std::invalid_argument("ttsvd: inadmissible rank " + std::to_string(rr) + " at step " + std::to_string(k));
            s = svd_top(M, rr);
        }
        out.discarded_sq.push_back(std::max(0.0, total - s.s.squaredNorm()));
        out.tt.cores.push_back(s.U);
        C = s.s.asDiagonal() * s.Vt;
        r = rr;
    }
    out.tt.cores.push_back(Eigen::Map<const DenseMatrix>(C.data(), r * X.dims[d - 1], 1));
    return out;
}

double tt_entry(const TTTensor& T, const std::vector<Index>& idx)
{
    if (idx.size() != T.dims.size()) throw std::invalid_argument("tt_entry: wrong index order");
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (size_t k = 0; k < T.cores.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= T.dims[k]) throw std::out_of_range("tt_entry: index out of range");
        const DenseMatrix& G = T.cores[k];
        const Index n = T.dims[k], r0 = G.rows() / n;
        Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(G.cols());
        for (Index a = 0; a < r0; ++a) w.noalias() += v(a) * G.row(a * n + idx[k]);
        v = std::move(w);
    }
    return v(0);
}

DenseTensor tt_materialize(const TTTensor& T, Index cap)
{
    T.validate();
    Index total = product(T.dims, 0, T.dims.size());
    if (total > cap) throw std::length_error("tt_materialize: " + std::to_string(total) + " entries exceed cap " + std::to_string(cap));
    DenseMatrix M = T.cores[0];
    for (size_t k = 1; k < T.cores.size(); ++k) {
        const DenseMatrix& G = T.cores[k];
        const Index n = T.dims[k], r0 = G.rows() / n, r1 = G.cols();
        Eigen::Map<const DenseMatrix> Gm(G.data(), r0, n * r1);
        DenseMatrix P = M * Gm;
        M = Eigen::Map<const DenseMatrix>(P.data(), P.rows() * n, r1);
    }
    return DenseTensor(T.dims, Eigen::Map<const Vector>(M.data(), M.size()));
}

DenseTensor tt_apply_entrywise(const TTTensor& T, const std::vector<Transform>& chain, Index cap)
{
    DenseTensor X = tt_materialize(T, cap);
    for (Index i = 0; i < X.size(); ++i) {
        double v = X.data(i);
        for (const auto& t : chain) v = t(v);
        X.data(i) = v;
    }
    return X;
}

EntryOracle tt_unfolding_oracle(const TTTensor& T, Index split)
{
    T.validate();
    if (split < 1 || split >= T.order()) throw std::invalid_argument("tt_unfolding_oracle: bad split");
    Index rows = product(T.dims, 0, static_cast<size_t>(split));
    Index cols = product(T.dims, static_cast<size_t>(split), T.dims.size());
    return EntryOracle(rows, cols, [T, split](Index i, Index j) {
        std::vector<Index> idx(T.dims.size());
        for (Index k = split - 1; k >= 0; --k) {
            idx[k] = i % T.dims[k];
            i /= T.dims[k];
        }
        for (Index k = T.order() - 1; k >= split; --k) {
            idx[k] = j % T.dims[k];
            j /= T.dims[k];
        }
        return tt_entry(T, idx);
    });
}

NegativeNorms negative_part_norms(const DenseTensor& X)
{
    NegativeNorms n;
    double acc = 0.0;
    for (Index i = 0; i < X.size(); ++i) {
        double v = X.data(i);
        if (v < 0) {
            acc += v * v;
            n.max = std::max(n.max, -v);
        }
    }
    n.fro = std::sqrt(acc);
    return n;
}

double tt_frobenius_error(const DenseTensor& X, const TTTensor& T)
{
    DenseTensor Y = tt_materialize(T);
    if (Y.dims != X.dims) throw std::invalid_argument("tt_frobenius_error: shape mismatch");
    return (X.data - Y.data).norm();
}

DenseTensor as_qtt(const Vector& v)
{
    Index n = v.size(), d = 0;
    while ((Index(1) << d) < n) ++d;
    if (n < 2 || (Index(1) << d) != n) throw std::invalid_argument("as_qtt: length must be a power of two >= 2");
    return DenseTensor(std::vector<Index>(d, 2), v);
}

void write_tt(const std::string& path, const TTTensor& T)
{
    T.validate();
    auto f = detail::open_out(path, "QAPT");
    detail::put_u64(f, T.dims.size());
    for (Index n : T.dims) detail::put_u64(f, static_cast<std::uint64_t>(n));
    for (Index r : T.ranks()) detail::put_u64(f, static_cast<std::uint64_t>(r));
    for (const auto& G : T.cores) detail::put_f64(f, G.data(), static_cast<std::size_t>(G.size()));
}

TTTensor read_tt(const std::string& path)
{
    auto f = detail::open_in(path, "QAPT");
    TTTensor T;
    auto d = detail::get_u64(f);
    for (std::uint64_t k = 0; k < d; ++k) T.dims.push_back(static_cast<Index>(detail::get_u64(f)));
    std::vector<Index> r{1};
    for (std::uint64_t k = 0; k + 1 < d; ++k) r.push_back(static_cast<Index>(detail::get_u64(f)));
    r.push_back(1);
    for (std::uint64_t k = 0; k < d; ++k) {
        DenseMatrix G(r[k] * T.dims[k], r[k + 1]);
        detail::get_f64(f, G.data(), static_cast<std::size_t>(G.size()));
        T.cores.push_back(std::move(G));
    }
    T.validate();
    return T;
}

}  // namespace qap
