#include "qap/cross.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qap {

double Transform::operator()(double x) const
{
    switch (kind) {
    case TransformKind::Identity: return x;
    case TransformKind::ClampNonneg: return x > 0.0 ? x : 0.0;
    case TransformKind::Abs: return std::abs(x);
    case TransformKind::Shift: return x + alpha;
    case TransformKind::Indent: return x > alpha ? x : alpha;
    case TransformKind::Arccot: return std::numbers::pi / 2 - std::atan(x);
    }
    return x;
}

DenseMatrix EntrySource::columns(const IndexSet& J) const
{
    DenseMatrix C(rows(), static_cast<Index>(J.size()));
    for (Index i = 0; i < rows(); ++i)
        for (size_t c = 0; c < J.size(); ++c) C(i, c) = entry(i, J[c]);
    return C;
}

DenseMatrix EntrySource::row_set(const IndexSet& I) const
{
    DenseMatrix R(static_cast<Index>(I.size()), cols());
    for (size_t r = 0; r < I.size(); ++r)
        for (Index j = 0; j < cols(); ++j) R(r, j) = entry(I[r], j);
    return R;
}

namespace {

class FnSource final : public EntrySource {
public:
    FnSource(Index m, Index n, EntryOracle::Fn f) : m_(m), n_(n), f_(std::move(f)) {}
    Index rows() const override { return m_; }
    Index cols() const override { return n_; }
    double entry(Index i, Index j) const override { return f_(i, j); }

private:
    Index m_, n_;
    EntryOracle::Fn f_;
};

class DenseSource final : public EntrySource {
public:
    explicit DenseSource(const DenseMatrix& X) : own_(X), X_(own_) {}
    DenseSource(const DenseMatrix& X, bool) : X_(X) {}
    Index rows() const override { return X_.rows(); }
    Index cols() const override { return X_.cols(); }
    double entry(Index i, Index j) const override { return X_(i, j); }
    DenseMatrix columns(const IndexSet& J) const override { return X_(Eigen::all, J); }
    DenseMatrix row_set(const IndexSet& I) const override { return X_(I, Eigen::all); }

private:
    DenseMatrix own_;
    const DenseMatrix& X_;
};

class FactoredSource final : public EntrySource {
public:
    explicit FactoredSource(const FactoredMatrix& Y) : Y_(Y) {}
    Index rows() const override { return Y_.rows(); }
    Index cols() const override { return Y_.cols(); }
    double entry(Index i, Index j) const override { return Y_.entry(i, j); }
    DenseMatrix columns(const IndexSet& J) const override
    {
        DenseMatrix RJ = Y_.right(J, Eigen::all);
        return Y_.left * RJ.transpose();
    }
    DenseMatrix row_set(const IndexSet& I) const override
    {
        DenseMatrix LI = Y_.left(I, Eigen::all);
        return LI * Y_.right.transpose();
    }

private:
    FactoredMatrix Y_;
};

}  // namespace

EntryOracle::EntryOracle(Index m, Index n, Fn f)
    : EntryOracle(std::make_shared<FnSource>(m, n, std::move(f)))
{
}

EntryOracle::EntryOracle(std::shared_ptr<const EntrySource> src)
    : src_(std::move(src)), count_(std::make_shared<std::uint64_t>(0))
{
}

EntryOracle EntryOracle::from_dense(const DenseMatrix& X)
{
    return EntryOracle(std::make_shared<DenseSource>(X));
}

EntryOracle EntryOracle::view_dense(const DenseMatrix& X)
{
    return EntryOracle(std::make_shared<DenseSource>(X, true));
}

EntryOracle EntryOracle::from_factored(const FactoredMatrix& Y)
{
    return EntryOracle(std::make_shared<FactoredSource>(Y));
}

EntryOracle EntryOracle::then(Transform t) const
{
    EntryOracle o = *this;
    o.chain_.push_back(t);
    return o;
}

double EntryOracle::apply(double x) const
{
    for (const auto& t : chain_) x = t(x);
    return x;
}

void EntryOracle::apply_inplace(DenseMatrix& M) const
{
    if (chain_.empty()) return;
    for (Index k = 0; k < M.size(); ++k) M.data()[k] = apply(M.data()[k]);
}

double EntryOracle::operator()(Index i, Index j) const
{
    ++*count_;
    return apply(src_->entry(i, j));
}

DenseMatrix EntryOracle::columns(const IndexSet& J) const
{
    DenseMatrix C = src_->columns(J);
    *count_ += static_cast<std::uint64_t>(C.size());
    apply_inplace(C);
    return C;
}

DenseMatrix EntryOracle::row_set(const IndexSet& I) const
{
    DenseMatrix R = src_->row_set(I);
    *count_ += static_cast<std::uint64_t>(R.size());
    apply_inplace(R);
    return R;
}

DenseMatrix EntryOracle::block(const IndexSet& I, const IndexSet& J) const
{
    DenseMatrix B(static_cast<Index>(I.size()), static_cast<Index>(J.size()));
    for (size_t a = 0; a < I.size(); ++a)
        for (size_t b = 0; b < J.size(); ++b) B(a, b) = (*this)(I[a], J[b]);
    return B;
}

namespace {

void put_set(std::ostream& os, const char* tag, const IndexSet& s)
{
    os << tag << ':';
    for (Index v : s) os << ' ' << v;
    os << '\n';
}

IndexSet get_set(std::istringstream& ls)
{
    IndexSet s;
    Index v;
    while (ls >> v) s.push_back(v);
    return s;
}

}  // namespace

std::string CrossState::to_text() const
{
    std::ostringstream os;
    os.precision(17);
    put_set(os, "I", I);
    put_set(os, "J", J);
    put_set(os, "Ir", Ir);
    put_set(os, "Jr", Jr);
    os << "nu: " << nu << '\n';
    return os.str();
}

CrossState CrossState::from_text(const std::string& text)
{
    CrossState st;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string tag = line.substr(0, colon);
        std::istringstream ls(line.substr(colon + 1));
        if (tag == "I") st.I = get_set(ls);
        else if (tag == "J") st.J = get_set(ls);
        else if (tag == "Ir") st.Ir = get_set(ls);
        else if (tag == "Jr") st.Jr = get_set(ls);
        else if (tag == "nu") ls >> st.nu;
        else throw std::invalid_argument("CrossState: unknown tag '" + tag + "'");
    }
    return st;
}

}  // namespace qap
