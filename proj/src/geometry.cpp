#include "qap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qap {

LinePair::LinePair(double theta_) : theta(theta_)
{
    if (!(theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15))
        throw std::invalid_argument("LinePair: angle must lie in (0, pi/2]");
}

Point2 quasi_project_line(const Point2& x, const Point2& dir, const QuasiSpec& spec, RngStream& rng)
{
    if (!(spec.sigma >= 1.0)) throw std::invalid_argument("quasi_project_line: sigma must be >= 1");
    const Point2 pi = x.dot(dir) * dir;
    const double dist = (x - pi).norm();
    const double reach = dist * std::sqrt(spec.sigma * spec.sigma - 1.0);
    // Unit direction along the line that increases the distance to the origin.
    const Point2 away = pi.dot(dir) >= 0.0 ? dir : Point2(-dir);
    switch (spec.mode) {
    case QuasiMode::Exact: return pi;
    case QuasiMode::AdversarialAway: return pi + reach * away;
    case QuasiMode::AdversarialToward: return pi - reach * away;
    case QuasiMode::RandomWithin: return pi + rng.uniform(-1.0, 1.0) * reach * away;
    }
    return pi;
}

TwoLineTrace run_two_line_qap(const LinePair& pair, const QuasiSpec& on_a, const QuasiSpec& on_b, const Point2& a0,
                              int n_cycles, RngStream& rng)
{
    if (std::abs(a0.y()) > 0.0 || a0.norm() == 0.0) throw std::invalid_argument("run_two_line_qap: a0 must be a nonzero point of A");
    TwoLineTrace tr;
    Point2 a = a0;
    const Point2 da = pair.dir_a(), db = pair.dir_b();
    auto dist_b = [&](const Point2& p) { return (p - p.dot(db) * db).norm(); };
    tr.norms.push_back(a.norm());
    tr.dist_b.push_back(dist_b(a));
    for (int k = 0; k < n_cycles; ++k) {
        Point2 b = quasi_project_line(a, db, on_b, rng);
        Point2 an = quasi_project_line(b, da, on_a, rng);
        tr.steps.push_back((b - a).norm());
        tr.steps.push_back((an - b).norm());
        a = an;
        tr.norms.push_back(a.norm());
        tr.dist_b.push_back(dist_b(a));
    }
    return tr;
}

double half_step_factor(double c, double sigma)
{
    return c + std::sqrt(std::max(0.0, 1.0 - c * c)) * std::sqrt(std::max(0.0, sigma * sigma - 1.0));
}

Kappa theorem_kappa(double c, double sigma_a, double sigma_b)
{
    return Kappa{sigma_a / sigma_b * half_step_factor(c, sigma_b), sigma_b / sigma_a * half_step_factor(c, sigma_a)};
}

namespace {

QuasiMode random_mode(RngStream& rng)
{
    static constexpr QuasiMode modes[] = {QuasiMode::Exact, QuasiMode::AdversarialAway, QuasiMode::AdversarialToward,
                                          QuasiMode::RandomWithin};
    return modes[rng.below(4)];
}

std::string describe(long trial, double theta, double sa, double sb)
{
    std::ostringstream os;
    os.precision(17);
    os << "trial " << trial << " theta=" << theta << " sigma_a=" << sa << " sigma_b=" << sb;
    return os.str();
}

}  // namespace

TheoremReport verify_theorem_rates(long n_trials, int n_cycles, RngStream& rng)
{
    TheoremReport rep;
    while (rep.trials < n_trials) {
        const double theta = rng.uniform(1e-3, std::numbers::pi / 2);
        const LinePair pair(theta);
        const double c = pair.c();
        const double top = c > 0 ? std::min(3.0, 1.0 / c) : 3.0;
        const double sa = rng.uniform(1.0, top), sb = rng.uniform(1.0, top);
        const Kappa kap = theorem_kappa(c, sa, sb);
        if (!(kap.product() < 1.0)) continue;
        const long trial = rep.trials++;
        QuasiSpec qa{sa, random_mode(rng)}, qb{sb, random_mode(rng)};
        RngStream run_rng = rng.split(static_cast<std::uint64_t>(trial));
        TwoLineTrace tr = run_two_line_qap(pair, qa, qb, Point2(rng.uniform(0.5, 2.0), 0.0), n_cycles, run_rng);
        const double lim = sb * (1.0 + kap.a) / (1.0 - kap.product());
        for (int k = 0; k < n_cycles; ++k) {
            if (tr.norms[k] == 0.0) break;
            ++rep.cycles_checked;
            const double ratio = tr.ratio(k);
            rep.worst_rate_slack = std::max(rep.worst_rate_slack, ratio / kap.product());
            // The limit is the origin, so |x - a_k| = |a_k|.
            const double bound = lim * tr.dist_b[k];
            rep.worst_limit_slack = std::max(rep.worst_limit_slack, tr.norms[k] / bound);
            bool bad = ratio > kap.product() * (1.0 + 1e-12) || tr.norms[k] > bound * (1.0 + 1e-12);
            if (bad) {
                if (rep.violations++ == 0) rep.first_failure = describe(trial, theta, sa, sb) + " cycle " + std::to_string(k);
            }
            if (k == 0) {
                std::ostringstream os;
                os.precision(17);
                os << trial << ',' << k << ',' << theta << ',' << sa << ',' << sb << ',' << ratio << ',' << kap.product();
                rep.csv_rows.push_back(os.str());
            }
        }
    }
    return rep;
}

TheoremReport verify_exact_b_rates(const LinePair& pair, double sigma_a, long n_trials, int n_cycles, RngStream& rng)
{
    TheoremReport rep;
    const double kappa = sigma_a * pair.c();
    for (long t = 0; t < n_trials; ++t) {
        ++rep.trials;
        QuasiSpec qa{sigma_a, random_mode(rng)}, qb{1.0, QuasiMode::Exact};
        RngStream run_rng = rng.split(static_cast<std::uint64_t>(t));
        TwoLineTrace tr = run_two_line_qap(pair, qa, qb, Point2(1.0, 0.0), n_cycles, run_rng);
        for (int k = 0; k < n_cycles; ++k) {
            if (tr.norms[k] == 0.0 || tr.steps[2 * k] == 0.0) break;
            ++rep.cycles_checked;
            const double ratio = tr.ratio(k);
            const double step = tr.steps[2 * k + 1] / tr.steps[2 * k];
            rep.worst_rate_slack = std::max(rep.worst_rate_slack, ratio / kappa);
            if (ratio > kappa * (1.0 + 1e-12) || step > kappa * (1.0 + 1e-12)) {
                if (rep.violations++ == 0)
                    rep.first_failure = describe(t, pair.theta, sigma_a, 1.0) + " cycle " + std::to_string(k);
            }
        }
    }
    return rep;
}

PythagoreanReport verify_pythagorean(int dim, double sigma, long n_trials, RngStream& rng)
{
    if (dim < 2) throw std::invalid_argument("verify_pythagorean: dim must be >= 2");
    if (!(sigma >= 1.0)) throw std::invalid_argument("verify_pythagorean: sigma must be >= 1");
    PythagoreanReport rep;
    const double room = std::sqrt(sigma * sigma - 1.0);
    for (long t = 0; t < n_trials; ++t) {
        ++rep.trials;
        Vector nu(dim), x(dim), w(dim);
        for (int i = 0; i < dim; ++i) nu(i) = rng.normal();
        nu.normalize();
        for (int i = 0; i < dim; ++i) x(i) = rng.normal();
        for (int i = 0; i < dim; ++i) w(i) = rng.normal();
        w -= w.dot(nu) * nu;
        w.normalize();
        const double h = x.dot(nu);
        const double dist = std::abs(h);
        if (dist == 0.0) continue;
        const double len = (t % 2 == 0 ? 1.0 : rng.uniform()) * room * dist;
        // x - pi and x - pi_sigma, formed without cancellation.
        const Vector to_pi = h * nu;
        const Vector to_ps = to_pi - len * w;
        const double cosine = to_pi.dot(to_ps) / (to_pi.norm() * to_ps.norm());
        const double offset = len * w.norm();
        const bool member = to_ps.norm() <= sigma * dist * (1.0 + 1e-12);
        rep.min_cosine = std::min(rep.min_cosine, cosine);
        if (room > 0) rep.max_offset_ratio = std::max(rep.max_offset_ratio, offset / (room * dist));
        if (!member || cosine < 1.0 / sigma - 1e-12 || offset > room * dist + 1e-12 * std::max(1.0, dist))
            ++rep.violations;
    }
    return rep;
}

HalfOpenSegmentCheck half_open_segment_check(double sigma, int depth)
{
    if (!(sigma > 1.0) || depth < 1) throw std::invalid_argument("half_open_segment_check: need sigma > 1, depth >= 1");
    const Point2 x(-1.0, 0.0);
    HalfOpenSegmentCheck out;
    out.inf_distance = 1.0;
    out.optimal_empty = true;
    for (int k = 0; k <= depth; ++k) {
        const Point2 a(std::ldexp(1.0, -k), 0.0);
        const double d = (x - a).norm();
        // a/2 lies in A and is strictly closer, so no sample is a minimiser.
        const Point2 half = 0.5 * a;
        if (!((x - half).norm() < d) || !(d > out.inf_distance)) out.optimal_empty = false;
        if (d <= sigma * out.inf_distance) {
            ++out.quasi_count;
            out.quasi_point = a;
        }
    }
    return out;
}

std::vector<Point2> spiral_vertices(double d, int depth)
{
    if (!(d > 0) || depth < 1) throw std::invalid_argument("spiral_vertices: need d > 0, depth >= 1");
    static const Point2 dirs[4] = {Point2(0, -1), Point2(1, 0), Point2(0, 1), Point2(-1, 0)};
    auto dir = [](int n) { return dirs[((n % 4) + 4) % 4]; };
    // Index n + depth holds a_n.
    std::vector<Point2> a(2 * depth + 2);
    a[depth] = Point2::Zero();
    for (int n = 0; n <= depth; ++n) a[n + depth + 1] = a[n + depth] + std::ldexp(d, -n) * dir(n);
    for (int n = -1; n >= -depth; --n) a[n + depth] = a[n + depth + 1] - std::ldexp(d, -n) * dir(n);
    return a;
}

SpiralProjection spiral_projection(double d, int depth, int k)
{
    if (4 * k - 1 < -depth || 4 * k + 4 > depth) throw std::invalid_argument("spiral_projection: k outside the polyline");
    const std::vector<Point2> a = spiral_vertices(d, depth);
    SpiralProjection out;
    out.k = k;
    const double q = std::ldexp(1.0, -4 * k);
    out.x = Point2(0.4 * d, -0.8 * (1.0 - 17.0 / 32.0 * q) * d);
    std::vector<std::pair<double, Point2>> cand;
    for (size_t i = 0; i + 1 < a.size(); ++i) {
        const Point2 e = a[i + 1] - a[i];
        const double t = std::clamp((out.x - a[i]).dot(e) / e.squaredNorm(), 0.0, 1.0);
        const Point2 p = a[i] + t * e;
        cand.emplace_back((out.x - p).norm(), p);
    }
    double best = cand.front().first;
    for (const auto& c : cand) best = std::min(best, c.first);
    out.distance = best;
    for (const auto& [dist, p] : cand) {
        if (dist > best * (1.0 + 1e-9)) continue;
        bool dup = false;
        for (const Point2& s : out.nearest) dup = dup || (s - p).norm() <= 1e-9 * best;
        if (!dup) out.nearest.push_back(p);
    }
    if (out.nearest.size() >= 2) {
        const Point2 u = (out.x - out.nearest[0]).normalized();
        const Point2 v = (out.x - out.nearest[1]).normalized();
        out.cosine = u.dot(v);
    }
    return out;
}

}  // namespace qap
