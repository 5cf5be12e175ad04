#pragma once

#include "qap/linalg.hpp"

#include <cstdint>
#include <string>

namespace qap {

// left * right^T. Singular values live in the left factor.
struct FactoredMatrix {
    DenseMatrix left;   // m x r
    DenseMatrix right;  // n x r

    FactoredMatrix() = default;
    FactoredMatrix(DenseMatrix l, DenseMatrix r);

    Index rows() const { return left.rows(); }
    Index cols() const { return right.rows(); }
    Index rank() const { return left.cols(); }

    double entry(Index i, Index j) const { return left.row(i).dot(right.row(j)); }
    DenseMatrix materialize() const;
    DenseMatrix row_block(Index i0, Index count) const;
};

struct RsvdConfig {
    Index oversampling = 2;
    Index power_iterations = 0;
};

FactoredMatrix svd_truncate(const DenseMatrix& X, Index r);
FactoredMatrix rsvd_truncate(const DenseMatrix& X, Index r, const RsvdConfig& cfg, RngStream& rng);

double frobenius_error(const DenseMatrix& X, const FactoredMatrix& Y);
double max_error(const DenseMatrix& X, const FactoredMatrix& Y);

struct NegativeNorms {
    double fro = 0.0;
    double max = 0.0;
};
NegativeNorms negative_part_norms(const FactoredMatrix& Y);
NegativeNorms negative_part_norms(const DenseMatrix& Y);

// Number of passes that touched all m*n entries of a factored matrix.
std::uint64_t dense_pass_count();
void note_dense_pass();

void write_factored(const std::string& path, const FactoredMatrix& Y);
FactoredMatrix read_factored(const std::string& path);

}  // namespace qap
