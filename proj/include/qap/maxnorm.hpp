#pragma once

#include "qap/lowrank.hpp"
#include "qap/schemes.hpp"
#include "qap/tt.hpp"

#include <optional>
#include <vector>

namespace qap {

// X + clip(Y - X, [-eps, eps]).
DenseMatrix ball_project(const DenseMatrix& Y, const DenseMatrix& X, double eps);
Vector ball_project(const Vector& Y, const Vector& X, double eps);

struct InnerOptions {
    double delta = 1e-3;
    Index max_iters = 500;
    Projector projector = Projector::SVD;  // SVD or RSVD
    RsvdConfig rsvd;
};

struct InnerResult {
    FactoredMatrix Y;
    double err_max = 0.0;
    Index iters = 0;
    std::vector<double> errors;  // errors[0] is the start
};

// Alternates ball projection and rank-r projection. Stops once an
// iteration improves the max-norm error by less than the factor (1 + delta).
InnerResult inner_ap(const DenseMatrix& X, Index r, double eps, const FactoredMatrix& Y0, const InnerOptions& opt,
                     RngStream& rng);

struct MaxnormOptions {
    InnerOptions inner;
    double interval_stop = 0.0;          // 0 means 1e-3 times the initial upper end
    std::optional<double> eps_plus_cap;  // search interval upper end, if below the start error
};

struct MaxnormResult {
    FactoredMatrix Y;
    double eps_certified = 0.0;  // = max |X - Y| of the returned Y
    Index outer_iters = 0;
    Index inner_iters_total = 0;
};

MaxnormResult maxnorm_approximate(const DenseMatrix& X, Index r, const FactoredMatrix& Y0, const MaxnormOptions& opt,
                                  RngStream& rng);

struct MaxnormTTResult {
    TTTensor Y;
    double eps_certified = 0.0;
    Index outer_iters = 0;
    Index inner_iters_total = 0;
};

// Starts from ttsvd(X, ranks) and uses ttsvd with fixed ranks as the inner projector.
MaxnormTTResult maxnorm_approximate_tt(const DenseTensor& X, const std::vector<Index>& ranks,
                                       const MaxnormOptions& opt);

enum class Y0Policy { Svd, HaarFactors, GaussianFactors };
FactoredMatrix maxnorm_start(const DenseMatrix& X, Index r, Y0Policy policy, RngStream& rng);

std::uint64_t udell_rank(std::uint64_t n, double eps);

}  // namespace qap
