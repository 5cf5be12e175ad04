#include "qap/generators.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace qap {

double bessel_i0_scaled(double z)
{
    if (!(z >= 0.0)) throw std::domain_error("bessel_i0_scaled: z must be >= 0");
    // The series has positive terms only; below 30 it needs at most ~70 of them.
    if (z < 30.0) {
        const double q = 0.25 * z * z;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::exp(-z) * sum;
    }
    // Asymptotic series; its smallest term near k = 2z is below e^{-2z}.
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double f = (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
        if (f >= 1.0) break;
        term *= f;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

DenseMatrix gen_smoluchowski(Index n, double step, double t)
{
    if (n < 1 || !(step > 0) || !(t >= 0)) throw std::invalid_argument("gen_smoluchowski: need n >= 1, step > 0, t >= 0");
    const double scale = 1.0 / ((1.0 + 0.5 * t) * (1.0 + 0.5 * t));
    const double g = t / (t + 2.0);
    DenseMatrix X(n, n);
    for (Index i = 0; i < n; ++i) {
        const double v1 = step * static_cast<double>(i);
        for (Index j = 0; j < n; ++j) {
            const double v2 = step * static_cast<double>(j);
            const double z = 2.0 * std::sqrt(v1 * v2 * g);
            X(i, j) = scale * std::exp(z - v1 - v2) * bessel_i0_scaled(z);
        }
    }
    return X;
}

std::string default_mixture_path()
{
    return std::string(QAP_DATA_DIR) + "/gaussian_mixture.json";
}

MixtureSpec load_mixture(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    MixtureSpec s;
    s.length = j.at("length").get<Index>();
    for (const auto& c : j.at("components"))
        s.components.push_back({c.at("weight").get<double>(), c.at("mean").get<double>(), c.at("sd").get<double>()});
    if (s.length < 1 || (s.length & (s.length - 1)) != 0) throw std::invalid_argument(path + ": length must be a power of two");
    for (const auto& c : s.components)
        if (!(c.weight >= 0 && c.sd > 0)) throw std::invalid_argument(path + ": bad component");
    return s;
}

Vector gen_gaussian_mixture(const MixtureSpec& spec)
{
    Vector f = Vector::Zero(spec.length);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (Index i = 0; i < spec.length; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(spec.length);
        for (const auto& c : spec.components) {
            const double u = (x - c.mean) / c.sd;
            f(i) += c.weight * std::exp(-0.5 * u * u) * norm / c.sd;
        }
    }
    return f;
}

QuantizedMatrix gen_quantized_matrix(Index n, Index r, RngStream& rng)
{
    if (n < 1 || r < 0) throw std::invalid_argument("gen_quantized_matrix: bad shape");
    QuantizedMatrix q;
    DenseMatrix L = gaussian_matrix(n, r, 1.0, rng);
    DenseMatrix R = gaussian_matrix(n, r, 1.0, rng);
    q.exact = FactoredMatrix(std::move(L), std::move(R));
    q.X = q.exact.materialize().array().round().matrix();
    return q;
}

QuantizedTensor gen_quantized_tt(Index n, Index r, RngStream& rng)
{
    if (n < 1 || r < 0) throw std::invalid_argument("gen_quantized_tt: bad shape");
    QuantizedTensor q;
    q.exact.dims = {n, n, n};
    q.exact.cores = {gaussian_matrix(n, r, 1.0, rng), gaussian_matrix(r * n, r, 1.0, rng), gaussian_matrix(r * n, 1, 1.0, rng)};
    if (r == 0) {
        q.X = DenseTensor({n, n, n});
        return q;
    }
    q.X = tt_materialize(q.exact);
    q.X.data = q.X.data.array().round().matrix();
    return q;
}

}  // namespace qap
