#pragma once

#include "qap/linalg.hpp"
#include "qap/lowrank.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qap {

enum class TransformKind { Identity, ClampNonneg, Abs, Shift, Indent, Arccot };

struct Transform {
    TransformKind kind = TransformKind::Identity;
    double alpha = 0.0;

    double operator()(double x) const;

    static Transform identity() { return {}; }
    static Transform clamp_nonneg() { return {TransformKind::ClampNonneg, 0.0}; }
    static Transform abs() { return {TransformKind::Abs, 0.0}; }
    static Transform shift(double a) { return {TransformKind::Shift, a}; }
    static Transform indent(double a) { return {TransformKind::Indent, a}; }
    static Transform arccot() { return {TransformKind::Arccot, 0.0}; }
};

// Where the raw entries come from. Row and column fetches default to
// entry-by-entry loops; dense and factored sources override them.
class EntrySource {
public:
    virtual ~EntrySource() = default;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    virtual double entry(Index i, Index j) const = 0;
    virtual DenseMatrix columns(const IndexSet& J) const;
    virtual DenseMatrix row_set(const IndexSet& I) const;
};

class EntryOracle {
public:
    using Fn = std::function<double(Index, Index)>;

    EntryOracle(Index m, Index n, Fn f);
    explicit EntryOracle(std::shared_ptr<const EntrySource> src);

    static EntryOracle from_dense(const DenseMatrix& X);
    // Keeps a reference: X must outlive the oracle.
    static EntryOracle view_dense(const DenseMatrix& X);
    static EntryOracle from_factored(const FactoredMatrix& Y);

    // Appends t to the transform chain; the evaluation counter is shared.
    EntryOracle then(Transform t) const;

    Index rows() const { return src_->rows(); }
    Index cols() const { return src_->cols(); }

    double operator()(Index i, Index j) const;
    DenseMatrix columns(const IndexSet& J) const;
    DenseMatrix row_set(const IndexSet& I) const;
    DenseMatrix block(const IndexSet& I, const IndexSet& J) const;

    // Value before the transform chain is applied; not counted.
    double raw(Index i, Index j) const { return src_->entry(i, j); }

    std::uint64_t evaluations() const { return *count_; }
    void reset_evaluations() const { *count_ = 0; }
    const std::vector<Transform>& transforms() const { return chain_; }

private:
    double apply(double x) const;
    void apply_inplace(DenseMatrix& M) const;

    std::shared_ptr<const EntrySource> src_;
    std::vector<Transform> chain_;
    std::shared_ptr<std::uint64_t> count_;
};

struct CrossState {
    IndexSet I, J;    // VOL: r each. PVOL: k_r rows, k_c columns.
    IndexSet Ir, Jr;  // PVOL auxiliary rank-r subsets
    double nu = 1.05;
    Index effective_rank = 0;
    Index swaps = 0;   // during the last call
    Index sweeps = 0;  // during the last call

    bool empty() const { return I.empty() && J.empty(); }
    std::string to_text() const;
    static CrossState from_text(const std::string& s);
};

class RankDeficientError : public NumericalError {
public:
    RankDeficientError(const std::string& what, IndexSet rows) : NumericalError(what), rows_(std::move(rows)) {}
    const IndexSet& rows() const { return rows_; }

private:
    IndexSet rows_;
};

class MaxvolNotConverged : public NumericalError {
public:
    MaxvolNotConverged(const std::string& what, IndexSet rows) : NumericalError(what), rows_(std::move(rows)) {}
    const IndexSet& rows() const { return rows_; }

private:
    IndexSet rows_;
};

struct MaxvolResult {
    IndexSet rows;
    Index swaps = 0;
};

// r rows of the tall m x r matrix A whose square submatrix is locally of
// maximal volume: no single swap raises |det| by more than nu.
MaxvolResult maxvol(const DenseMatrix& A, const IndexSet& start_rows, double nu = 1.05, Index max_swaps = -1);

// k >= r rows of A maximising det(A(I)^T A(I)) up to single swaps.
MaxvolResult maxvol_rect(const DenseMatrix& A, const IndexSet& start_rows, Index k, double nu = 1.05,
                         Index max_swaps = -1);

// r columns of the wide matrix A maximising the r-projective volume, i.e.
// the product of the singular values of the selected k x r block.
MaxvolResult dominant_r(const DenseMatrix& A, const IndexSet& start_cols, double nu = 1.05, Index max_swaps = -1);

// Greedy row pivots of partial-pivoting LU; throws RankDeficientError when
// fewer than r independent rows exist.
IndexSet lu_pivot_rows(const DenseMatrix& A);

struct CrossOptions {
    double nu = 1.05;
    Index max_sweeps = 20;
    bool warm = true;  // reuse index sets from the state when present
};

std::pair<FactoredMatrix, CrossState> cross_project_vol(const EntryOracle& X, Index r, const CrossState& state,
                                                        RngStream& rng, const CrossOptions& opt = {});

std::pair<FactoredMatrix, CrossState> cross_project_pvol(const EntryOracle& X, Index r, Index k_r, Index k_c,
                                                         const CrossState& state, RngStream& rng,
                                                         const CrossOptions& opt = {});

struct MinEntryEstimate {
    Index i = 0, j = 0;
    double value = 0.0;
};
MinEntryEstimate estimate_min_entry(const EntryOracle& X, RngStream& rng);

}  // namespace qap
