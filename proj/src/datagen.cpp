#include "fbis/datagen.hpp"

#include <cmath>

#include "fbis/parallel.hpp"
#include "fbis/rng.hpp"
#include "fbis/screening.hpp"

namespace fbis {

double g1(double x) {
    const double t = 2.0 * x - 1.0;
    return t * t;
}

double g2(double x) {
    const double s = std::sin(2.0 * M_PI * x);
    return s / (2.0 - s);
}

double g3(double x) {
    const double s = std::sin(2.0 * M_PI * x);
    const double c = std::cos(2.0 * M_PI * x);
    return 0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c + 0.5 * s * s * s;
}

Matrix gen_correlated_uniforms(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw Error(ErrorCode::InvalidRho, "rho must lie in [0,1)");
    Matrix X(n, p);
    const double carry = std::sqrt(1.0 - rho * rho);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(sub_seed(seed, seed_tag::rows, i));
            // AR(1) latent Gaussian gives Corr(Xt_j, Xt_k) = rho^|j-k| exactly
            double latent = rng.normal();
            X(i, 0) = norm_cdf(latent);
            for (std::size_t j = 1; j < p; ++j) {
                latent = rho * latent + carry * rng.normal();
                X(i, j) = norm_cdf(latent);
            }
        }
    });
    return X;
}

Dataset gen_example(const SimSpec& spec) {
    if (spec.example < 1 || spec.example > 3)
        throw Error(ErrorCode::InvalidArgument, "example must be 1, 2 or 3");
    if (spec.p < 4)
        throw Error(ErrorCode::InvalidDimension, "simulation designs need p >= 4");
    if (spec.n < 2) throw Error(ErrorCode::TooFewRows, "simulation needs n >= 2");
    if (!(spec.sigma2 >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "sigma2 must be >= 0");

    Matrix X = gen_correlated_uniforms(spec.n, spec.p, spec.rho, spec.seed);
    std::vector<double> y(spec.n);
    const double sigma = std::sqrt(spec.sigma2);
    const double two_pi = 2.0 * M_PI;

    parallel_for(spec.n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double signal = 0.0;
            switch (spec.example) {
            case 1:
                signal = 4.0 * g1(X(i, 0)) + 3.0 * g2(X(i, 1)) + 3.0 * g3(X(i, 2));
                break;
            case 2:
                signal = g1(X(i, 0) + X(i, 1) - X(i, 2) - X(i, 3));
                break;
            case 3:
                signal = 4.0 * X(i, 0) +
                         2.0 * std::sin(two_pi * X(i, 0)) * std::sin(two_pi * X(i, 1)) +
                         3.0 * std::sin(two_pi * X(i, 1)) * std::sin(two_pi * X(i, 2));
                break;
            }
            Rng noise(sub_seed(spec.seed, seed_tag::noise, i));
            y[i] = signal + sigma * noise.normal();
        }
    });

    std::vector<std::size_t> truth =
        spec.example == 2 ? std::vector<std::size_t>{0, 1, 2, 3} : std::vector<std::size_t>{0, 1, 2};
    return Dataset(std::move(y), std::move(X), {}, std::move(truth));
}

} // namespace fbis
