#pragma once

#include "qap/lowrank.hpp"
#include "qap/tt.hpp"

#include <string>
#include <vector>

namespace qap {

// e^{-z} I_0(z) for z >= 0.
double bessel_i0_scaled(double z);

// nu(v1, v2, t) = e^{-v1-v2} I_0(2 sqrt(v1 v2 t / (t + 2))) / (1 + t/2)^2
// on the grid v = step * i, i = 0..n-1.
DenseMatrix gen_smoluchowski(Index n, double step, double t);

struct MixtureComponent {
    double weight = 0.0, mean = 0.0, sd = 0.0;
};

struct MixtureSpec {
    Index length = 1024;
    std::vector<MixtureComponent> components;
};

std::string default_mixture_path();
MixtureSpec load_mixture(const std::string& path = default_mixture_path());
// Sum of weighted normal densities sampled at x_i = i / length.
Vector gen_gaussian_mixture(const MixtureSpec& spec);

struct QuantizedMatrix {
    DenseMatrix X;          // rounded
    FactoredMatrix exact;   // L R^T with standard normal n x r factors
};
QuantizedMatrix gen_quantized_matrix(Index n, Index r, RngStream& rng);

struct QuantizedTensor {
    DenseTensor X;
    TTTensor exact;  // standard normal cores, TT-ranks (r, r)
};
QuantizedTensor gen_quantized_tt(Index n, Index r, RngStream& rng);

}  // namespace qap
