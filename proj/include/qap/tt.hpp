#pragma once

#include "qap/cross.hpp"
#include "qap/linalg.hpp"
#include "qap/lowrank.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qap {

// Row-major dense tensor: the last index runs fastest.
struct DenseTensor {
    std::vector<Index> dims;
    Vector data;

    DenseTensor() = default;
    explicit DenseTensor(std::vector<Index> d);
    DenseTensor(std::vector<Index> d, Vector v);

    Index size() const { return data.size(); }
    Index order() const { return static_cast<Index>(dims.size()); }
    Index linear(const std::vector<Index>& idx) const;
    double operator()(const std::vector<Index>& idx) const { return data(linear(idx)); }
    double norm() const { return data.norm(); }
};

// Core k is stored left-unfolded: (r_{k-1} * n_k) x r_k, so that entry
// (a, i, b) sits at row a * n_k + i, column b.
struct TTTensor {
    std::vector<Index> dims;
    std::vector<DenseMatrix> cores;

    Index order() const { return static_cast<Index>(dims.size()); }
    // Internal ranks r_1 .. r_{d-1}.
    std::vector<Index> ranks() const;
    void validate() const;
};

struct TTTarget {
    std::vector<Index> ranks;      // used when tol is empty
    std::optional<double> tol;     // relative Frobenius tolerance
    static TTTarget with_ranks(std::vector<Index> r) { return {std::move(r), std::nullopt}; }
    static TTTarget with_tol(double t) { return {{}, t}; }
};

struct TTSvdResult {
    TTTensor tt;
    std::vector<double> discarded_sq;  // per unfolding step
};

TTSvdResult ttsvd_full(const DenseTensor& X, const TTTarget& target);
inline TTTensor ttsvd(const DenseTensor& X, const TTTarget& target) { return ttsvd_full(X, target).tt; }

double tt_entry(const TTTensor& T, const std::vector<Index>& idx);

constexpr Index kDefaultMaterializeCap = Index(1) << 24;
DenseTensor tt_materialize(const TTTensor& T, Index cap = kDefaultMaterializeCap);
DenseTensor tt_apply_entrywise(const TTTensor& T, const std::vector<Transform>& chain,
                               Index cap = kDefaultMaterializeCap);
// Matrix view of the unfolding that splits the modes after `split` of them;
// entries are evaluated one at a time from the cores.
EntryOracle tt_unfolding_oracle(const TTTensor& T, Index split);

NegativeNorms negative_part_norms(const DenseTensor& X);
double tt_frobenius_error(const DenseTensor& X, const TTTensor& T);

// Unfolding of X with the first `split` modes as rows.
DenseMatrix unfolding(const DenseTensor& X, Index split);

// Length-2^d vector viewed as a 2 x ... x 2 tensor; bit d-1-k of the
// position is the k-th index (big-endian).
DenseTensor as_qtt(const Vector& v);

void write_tt(const std::string& path, const TTTensor& T);
TTTensor read_tt(const std::string& path);

}  // namespace qap
