#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qap {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Counter-based stream: value k is a hash of (seed, k), so a stream can be
// split or replayed without touching its siblings.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    double uniform();                    // [0, 1)
    double uniform(double a, double b);  // [a, b)
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    RngStream split(std::uint64_t id) const;

    // k distinct indices from [0, n), in draw order.
    IndexSet sample_without_replacement(Index n, Index k);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);

struct SvdResult {
    DenseMatrix U;   // m x k
    Vector s;        // k, nonincreasing
    DenseMatrix Vt;  // k x n
};

// Thin SVD, k = min(m, n). Left singular vectors are sign-normalised so that
// their largest-magnitude entry is positive.
SvdResult svd(const DenseMatrix& X);

// Leading k singular triplets. Uses a partial solver when k is small.
SvdResult svd_top(const DenseMatrix& X, Index k);

DenseMatrix qr_orthonormal(const DenseMatrix& X);
DenseMatrix pseudoinverse(const DenseMatrix& X, double rank_tol = 1e-12);

DenseMatrix gaussian_matrix(Index m, Index n, double stddev, RngStream& rng);
DenseMatrix haar_orthogonal(Index n, RngStream& rng);
// First r columns of a Haar-distributed orthogonal matrix.
DenseMatrix haar_columns(Index n, Index r, RngStream& rng);

double max_abs(const DenseMatrix& X);
// sigma_min / sigma_max of a square matrix; 0 when singular or not finite.
double rcond(const DenseMatrix& M);

// Binary and CSV formats.
void write_matrix(const std::string& path, const DenseMatrix& X);
DenseMatrix read_matrix(const std::string& path);
void write_matrix_csv(const std::string& path, const DenseMatrix& X);
DenseMatrix read_matrix_csv(const std::string& path);

}  // namespace qap
