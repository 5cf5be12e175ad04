#pragma once

#include "qap/cross.hpp"
#include "qap/lowrank.hpp"
#include "qap/tt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qap {

enum class Scheme { AP, RP, SP, IP };
enum class Projector { SVD, RSVD, VOL_warm, VOL_cold, PVOL_warm, PVOL_cold, TTSVD };
enum class AlphaMode { Auto, Exact, Surrogate };

std::string to_string(Scheme s);
std::string to_string(Projector p);
Scheme parse_scheme(const std::string& s);
Projector parse_projector(const std::string& s);

struct SchemeConfig {
    Scheme scheme = Scheme::AP;
    Projector projector = Projector::SVD;
    Index rank = 1;
    double beta = 0.0;
    Index max_iters = 100;
    std::uint64_t seed = 0;
    AlphaMode alpha_mode = AlphaMode::Auto;
    RsvdConfig rsvd;
    Index pvol_rows = 0;  // k_r and k_c; 0 means 3 * rank
    CrossOptions cross;
    std::optional<FactoredMatrix> y0;  // overrides projector(X)

    // Tensor runs: Y0 = ttsvd(X, tt_start) and its ranks are kept fixed.
    TTTarget tt_start = TTTarget::with_tol(1e-2);
};

struct TraceRow {
    Index iter = 0;
    double neg_fro = 0.0;
    double neg_max = 0.0;
    double rel_err = 0.0;
    double alpha = 0.0;
    Index swaps = 0;
};

struct IterationTrace {
    std::vector<TraceRow> rows;
    std::string to_csv() const;
    void write_csv(const std::string& path) const;
    static IterationTrace read_csv(const std::string& path);
};

Transform constraint_transform(Scheme s, double alpha);
DenseMatrix constraint_step(const DenseMatrix& Y, Scheme s, double alpha);
EntryOracle constraint_step(const FactoredMatrix& Y, Scheme s, double alpha);

// beta * max(0, -min Y): exact scans the entries, surrogate uses the
// rank-1 cross estimate of the minimum.
double compute_alpha(const DenseMatrix& Y, double beta);
double compute_alpha(const FactoredMatrix& Y, double beta, AlphaMode mode, RngStream& rng);

struct MatrixRun {
    FactoredMatrix Y;
    IterationTrace trace;
};
MatrixRun run_scheme(const DenseMatrix& X, const SchemeConfig& cfg);

struct TensorRun {
    TTTensor Y;
    IterationTrace trace;
};
TensorRun run_scheme_tt(const DenseTensor& X, const SchemeConfig& cfg);

}  // namespace qap
