#pragma once

#include "qap/cross.hpp"
#include "qap/lowrank.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qap {

struct CompletionProblem {
    Index m = 0, n = 0, r = 0;
    std::vector<std::pair<Index, Index>> omega;  // may repeat
    Vector observed;                             // one value per omega entry
    FactoredMatrix X0;
    std::optional<FactoredMatrix> truth;  // experiment mode

    void validate() const;
};

// Distinct positions of omega with their observed values.
struct SamplingSet {
    std::vector<Index> rows, cols;
    Vector values;
    Index size() const { return static_cast<Index>(rows.size()); }
    static SamplingSet from_problem(const CompletionProblem& p);
};

// U diag(s) V^T with orthonormal U (m x r) and V (n x r).
struct ManifoldPoint {
    DenseMatrix U;
    Vector s;
    DenseMatrix V;

    static ManifoldPoint from_factored(const FactoredMatrix& Y);
    FactoredMatrix factored() const;
};

// U M V^T + Up V^T + U Vp^T with U^T Up = 0 and V^T Vp = 0.
struct TangentVector {
    DenseMatrix M, Up, Vp;
    double squared_norm() const { return M.squaredNorm() + Up.squaredNorm() + Vp.squaredNorm(); }
};

// (Y - observed) on the distinct sampled positions.
Vector sparse_residual(const FactoredMatrix& Y, const SamplingSet& S);
Vector sparse_residual(const ManifoldPoint& X, const SamplingSet& S);

TangentVector tangent_project(const SamplingSet& S, const Vector& g, const ManifoldPoint& X);
// Values of the tangent vector on the sampled positions.
Vector tangent_sample(const TangentVector& T, const ManifoldPoint& X, const SamplingSet& S);

class Stagnation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

double line_search_step(const TangentVector& T, const ManifoldPoint& X, const SamplingSet& S);

struct RetractResult {
    ManifoldPoint X;
    bool rank_collapse = false;
};
RetractResult retract(const ManifoldPoint& X, double tau, const TangentVector& T);

// ||A - B||_F from factors only.
double factored_distance(const ManifoldPoint& A, const FactoredMatrix& B);
double factored_norm(const FactoredMatrix& B);

enum class Regularize { None, ApVolWarm };

struct CompletionOptions {
    Index max_iters = 1000;
    Regularize regularize = Regularize::None;
    bool persist_cross_state = true;
    double success_tol = 1e-6;
    std::uint64_t seed = 0;
    CrossOptions cross;
};

struct CompletionStep {
    Index iter = 0;
    double sampled_residual = 0.0;  // ||P(Y - X*)|| / ||P(X*)||
    double rel_err = -1.0;          // against the truth when known
    double tau = 0.0;
    bool rank_collapse = false;
};

struct CompletionResult {
    FactoredMatrix Y;
    bool converged = false;
    Index iters = 0;
    double final_rel_err = -1.0;
    std::vector<CompletionStep> history;
    CrossState cross_state;
};

CompletionResult complete(const CompletionProblem& p, const CompletionOptions& opt);

// Nonnegative instance: factors uniform on (0, 1/sqrt(n)), omega of
// gamma * r (m + n - r) samples drawn with replacement, start from Haar factors.
CompletionProblem make_completion_problem(Index m, Index n, Index r, double gamma, RngStream& rng);

}  // namespace qap
