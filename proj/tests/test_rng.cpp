#include "doctest.h"

#include <cmath>

#include "fbis/rng.hpp"

using namespace fbis;

namespace {

// Simpson quadrature of the standard normal density up to x.
double phi_by_quadrature(double x) {
    const double lo = -10.0;
    const int steps = 40000;
    const double dx = (x - lo) / steps;
    auto dens = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    double s = dens(lo) + dens(x);
    for (int i = 1; i < steps; ++i) s += dens(lo + i * dx) * (i % 2 ? 4.0 : 2.0);
    return s * dx / 3.0;
}

} // namespace

TEST_CASE("norm_cdf matches quadrature to 1e-12") {
    for (double x : {-3.0, -1.5, -0.5, 0.0, 0.3, 1.0, 1.96, 2.5, 4.0}) {
        CHECK(norm_cdf(x) == doctest::Approx(phi_by_quadrature(x)).epsilon(1e-12));
    }
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("norm_quantile inverts norm_cdf") {
    for (double p : {1e-10, 1e-6, 0.01, 0.2, 0.425, 0.5, 0.7, 0.975, 0.999999, 1.0 - 1e-10}) {
        const double x = norm_quantile(p);
        CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(norm_quantile(0.5) == 0.0);
    CHECK_THROWS(norm_quantile(0.0));
    CHECK_THROWS(norm_quantile(1.0));
}

TEST_CASE("uniform01 stays inside the open interval and reproduces") {
    Rng a(42), b(42), c(43);
    bool identical = true, differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        identical = identical && (u == b.uniform01());
        differs = differs || (u != c.uniform01());
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("sub_seed decorrelates streams") {
    CHECK(sub_seed(1, 2, 3) != sub_seed(1, 2, 4));
    CHECK(sub_seed(1, 2, 3) != sub_seed(1, 3, 3));
    CHECK(sub_seed(1, 2, 3) != sub_seed(2, 2, 3));
    CHECK(sub_seed(1, 2, 3) == sub_seed(1, 2, 3));
}

TEST_CASE("random_permutation is a permutation and seed-stable") {
    Rng rng(7);
    auto p = random_permutation(100, rng);
    std::vector<bool> seen(100, false);
    for (auto v : p) {
        CHECK(v < 100);
        CHECK(!seen[v]);
        seen[v] = true;
    }
    Rng rng2(7);
    CHECK(p == random_permutation(100, rng2));
}
