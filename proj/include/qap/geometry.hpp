#pragma once

#include "qap/linalg.hpp"

#include <string>
#include <vector>

namespace qap {

using Point2 = Eigen::Vector2d;

// A = span{(1,0)}, B = span{(cos t, sin t)} with t in (0, pi/2].
struct LinePair {
    double theta = 0.0;

    explicit LinePair(double theta_);
    Point2 dir_a() const { return Point2(1.0, 0.0); }
    Point2 dir_b() const { return Point2(std::cos(theta), std::sin(theta)); }
    double c() const { return std::abs(std::cos(theta)); }
};

enum class QuasiMode { Exact, AdversarialAway, AdversarialToward, RandomWithin };

struct QuasiSpec {
    double sigma = 1.0;
    QuasiMode mode = QuasiMode::Exact;
};

// Point of the line through the origin with unit direction `dir` whose
// distance to x is at most sigma * dist(x, line).
Point2 quasi_project_line(const Point2& x, const Point2& dir, const QuasiSpec& spec, RngStream& rng);

struct TwoLineTrace {
    std::vector<double> norms;  // |a_k|, k = 0..n_cycles
    std::vector<double> steps;  // |b_1 - a_0|, |a_1 - b_1|, |b_2 - a_1|, ...
    std::vector<double> dist_b;  // dist(a_k, B)
    double ratio(size_t k) const { return norms[k + 1] / norms[k]; }
};

// Alternates quasi-projections onto B and then A, starting from a0 on A.
TwoLineTrace run_two_line_qap(const LinePair& pair, const QuasiSpec& on_a, const QuasiSpec& on_b, const Point2& a0,
                              int n_cycles, RngStream& rng);

// Per-cycle contraction constants for sigma-quasi projections onto two lines.
struct Kappa {
    double a = 0.0, b = 0.0;
    double product() const { return a * b; }
};
Kappa theorem_kappa(double c, double sigma_a, double sigma_b);
// c + sqrt(1 - c^2) sqrt(sigma^2 - 1): the worst factor of one half step.
double half_step_factor(double c, double sigma);

struct TheoremReport {
    long trials = 0;
    long cycles_checked = 0;
    long violations = 0;
    double worst_rate_slack = 0.0;   // max over cycles of ratio / (kappa_a kappa_b)
    double worst_limit_slack = 0.0;  // max of |a_n| / bound
    std::string first_failure;
    std::vector<std::string> csv_rows;  // trial,cycle,theta,sigma_a,sigma_b,ratio,bound
    bool ok() const { return violations == 0; }
};

// Random (theta, sigma_a, sigma_b, modes) with kappa_a kappa_b < 1: checks
// the per-cycle rate and the limit-distance bound on every cycle.
TheoremReport verify_theorem_rates(long n_trials, int n_cycles, RngStream& rng);

// Fixed pair: exact projection onto B, sigma-quasi onto A. Checks the per-cycle
// rate sigma_a c and the step bound |a_k - b_k| <= sigma_a c |b_k - a_{k-1}|.
TheoremReport verify_exact_b_rates(const LinePair& pair, double sigma_a, long n_trials, int n_cycles, RngStream& rng);

struct PythagoreanReport {
    long trials = 0;
    long violations = 0;
    double min_cosine = 1.0;
    double max_offset_ratio = 0.0;  // |pi_sigma - pi| / (sqrt(sigma^2 - 1) dist)
    bool ok() const { return violations == 0; }
};

// Random hyperplanes through the origin in R^dim, random points, random
// sigma-quasi projections (half of them on the boundary of the admissible set).
PythagoreanReport verify_pythagorean(int dim, double sigma, long n_trials, RngStream& rng);

// A = {(t, 0) : 0 < t <= 1}, x = (-1, 0), sampled at t = 2^-k, k = 0..depth.
struct HalfOpenSegmentCheck {
    double inf_distance = 0.0;  // 1, approached but not attained
    bool optimal_empty = false;
    long quasi_count = 0;  // sampled points within sigma * inf_distance
    Point2 quasi_point;
};
HalfOpenSegmentCheck half_open_segment_check(double sigma, int depth);

// Vertices a_n, n in [-depth, depth + 1], of the square spiral converging to (2/5)(d, -2d).
std::vector<Point2> spiral_vertices(double d, int depth);

struct SpiralProjection {
    int k = 0;
    Point2 x;
    double distance = 0.0;
    std::vector<Point2> nearest;  // all minimisers found on the polyline
    double cosine = 1.0;          // between the two unit directions x - pi
};
SpiralProjection spiral_projection(double d, int depth, int k);

}  // namespace qap
