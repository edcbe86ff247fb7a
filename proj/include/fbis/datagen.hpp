#pragma once

#include <cstdint>

#include "fbis/dataset.hpp"

namespace fbis {

// Simulation designs: three regression models over correlated uniform
// predictors (Gaussian copula with AR(1) latent correlation rho^|j-k|).
struct SimSpec {
    int example = 1;           // 1, 2 or 3
    std::size_t n = 400;
    std::size_t p = 1000;
    double rho = 0.0;          // in [0,1)
    double sigma2 = 1.0;       // noise variance
    std::uint64_t seed = 0;

    bool operator==(const SimSpec&) const = default;
};

double g1(double x); // (2x-1)^2
double g2(double x); // sin(2 pi x) / (2 - sin(2 pi x))
double g3(double x); // five-term trigonometric sum

// n x p matrix with Uniform[0,1] marginals; latent AR(1) Gaussian rows are
// generated per-row from independent substreams, so output is identical
// under any parallel schedule.
Matrix gen_correlated_uniforms(std::size_t n, std::size_t p, double rho, std::uint64_t seed);

Dataset gen_example(const SimSpec& spec);

} // namespace fbis
