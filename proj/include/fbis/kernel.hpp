#pragma once

#include <cmath>
#include <string>

#include "fbis/errors.hpp"

namespace fbis {

enum class KernelFamily { Gaussian, Epanechnikov };

// Both families are normalized densities with no free parameters:
// Gaussian K(u) = (2*pi)^(-1/2) exp(-u^2/2); Epanechnikov K(u) = 0.75(1-u^2) on |u|<=1.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;

    bool operator==(const KernelSpec&) const = default;
};

inline constexpr double kGaussK0 = 0.39894228040143267794; // (2*pi)^(-1/2)

inline double kernel_eval(double u, KernelSpec spec) {
    switch (spec.family) {
    case KernelFamily::Gaussian:
        return kGaussK0 * std::exp(-0.5 * u * u);
    case KernelFamily::Epanechnikov: {
        const double t = 1.0 - u * u;
        return t > 0.0 ? 0.75 * t : 0.0;
    }
    }
    return 0.0;
}

// Unnormalized kernel with k(0) = 1. In every Nadaraya-Watson ratio the
// normalizing constant cancels row-wise, so the hot loops use this form.
inline double kernel_unnorm(double u, KernelFamily family) {
    if (family == KernelFamily::Gaussian) return std::exp(-0.5 * u * u);
    const double t = 1.0 - u * u;
    return t > 0.0 ? t : 0.0;
}

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

// Smoothing bandwidth: a positive real or the explicit infinite tag. The
// infinite case must reduce fits to the sample mean exactly, so it is a tag
// rather than a large float.
class Bandwidth {
public:
    static Bandwidth infinite() { return Bandwidth(true, 0.0); }
    static Bandwidth finite(double value) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw Error(ErrorCode::InvalidArgument, "finite bandwidth must be > 0");
        return Bandwidth(false, value);
    }

    bool is_infinite() const noexcept { return infinite_; }
    double value() const {
        if (infinite_) throw Error(ErrorCode::InvalidArgument, "infinite bandwidth has no value");
        return value_;
    }
    // 1/h, with 0 standing for h = infinity
    double inverse() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }

    static Bandwidth from_inverse(double lambda) {
        return lambda == 0.0 ? infinite() : finite(1.0 / lambda);
    }

    bool operator==(const Bandwidth&) const = default;

private:
    Bandwidth(bool inf, double v) : infinite_(inf), value_(v) {}
    bool infinite_;
    double value_;
};

} // namespace fbis
