#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbis/datagen.hpp"
#include "fbis/mekro.hpp"
#include "fbis/rng.hpp"
#include "fbis/smoothing.hpp"
#include "oracles.hpp"

using namespace fbis;

namespace {

Matrix random_design(std::size_t n, std::size_t d, Rng& rng) {
    Matrix X(n, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) X(i, j) = rng.uniform01();
    return X;
}

std::vector<double> quadratic_response(const Matrix& X, double noise_sd, Rng& rng) {
    std::vector<double> y(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i)
        y[i] = 4.0 * g1(X(i, 0)) + noise_sd * rng.normal();
    return y;
}

double tss_of(std::span<const double> y) {
    const double m = oracle::mean(y);
    double s = 0.0;
    for (double v : y) s += (v - m) * (v - m);
    return s;
}

} // namespace

TEST_CASE("mekro_objective") {
    KernelSpec gauss;
    Rng rng(101);
    const auto X = random_design(18, 3, rng);
    const auto y = quadratic_response(X, 0.3, rng);

    SUBCASE("all-zero lambda gives the total sum of squares") {
        std::vector<double> lam(3, 0.0);
        CHECK(mekro_objective(lam, X, y, gauss) == doctest::Approx(tss_of(y)).epsilon(1e-14));
    }

    SUBCASE("d=1 reparameterization matches the univariate RSS") {
        Matrix X1(18, 1);
        for (std::size_t i = 0; i < 18; ++i) X1(i, 0) = X(i, 0);
        const double h = 0.35;
        std::vector<double> lam{1.0 / h};
        const auto s = smoother_summary(X1.col(0), y, Bandwidth::finite(h), gauss);
        double rss = 0.0;
        for (std::size_t i = 0; i < 18; ++i) {
            const double r = y[i] - s.fitted[i];
            rss += r * r;
        }
        CHECK(mekro_objective(lam, X1, y, gauss) == doctest::Approx(rss).epsilon(1e-12));
    }

    SUBCASE("random instances match the product-kernel oracle") {
        for (int rep = 0; rep < 10; ++rep) {
            Rng r2(200 + rep);
            const std::size_t d = 1 + r2.below(3);
            const auto Xi = random_design(12, d, r2);
            std::vector<double> yi(12);
            for (auto& v : yi) v = r2.normal();
            std::vector<double> lam(d);
            for (auto& l : lam) l = 4.0 * r2.uniform01();
            if (d > 1) lam[0] = 0.0; // exercise the infinite coordinate
            const double want = oracle::mekro_rss_formula(Xi, yi, lam);
            CHECK(mekro_objective(lam, Xi, yi, gauss) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("mekro_gradient agrees with central finite differences") {
    KernelSpec gauss;
    std::size_t checked = 0;
    for (int rep = 0; rep < 50; ++rep) {
        Rng rng(300 + rep);
        const std::size_t n = 10 + rng.below(15);
        const std::size_t d = 1 + rng.below(4);
        const auto X = random_design(n, d, rng);
        std::vector<double> y(n);
        for (auto& v : y) v = rng.normal();
        std::vector<double> lam(d);
        for (auto& l : lam) l = 0.3 + 3.0 * rng.uniform01(); // interior

        const auto grad = mekro_gradient(lam, X, y, gauss);
        for (std::size_t j = 0; j < d; ++j) {
            const double step = 1e-6;
            std::vector<double> up(lam), dn(lam);
            up[j] += step;
            dn[j] -= step;
            const double fd = (mekro_objective(up, X, y, gauss) -
                               mekro_objective(dn, X, y, gauss)) /
                              (2.0 * step);
            const double scale = std::max({std::fabs(fd), std::fabs(grad[j]), 1e-4});
            CHECK(std::fabs(grad[j] - fd) / scale <= 1e-5);
            ++checked;
        }
    }
    CHECK(checked >= 50);
}

TEST_CASE("mekro_gradient edge behavior") {
    KernelSpec gauss;
    Rng rng(401);
    const auto X = random_design(15, 2, rng);

    SUBCASE("constant response gives a zero gradient") {
        std::vector<double> y(15, 2.5);
        std::vector<double> lam{1.0, 0.7};
        // RSS is identically zero up to rounding, so the gradient is ~1e-30
        for (double g : mekro_gradient(lam, X, y, gauss)) CHECK(std::fabs(g) < 1e-20);
    }

    SUBCASE("lambda = 0 coordinates have zero one-sided derivative") {
        std::vector<double> y(15);
        for (auto& v : y) v = rng.normal();
        std::vector<double> lam{0.0, 1.2};
        const auto g = mekro_gradient(lam, X, y, gauss);
        CHECK(g[0] == 0.0);
    }

    SUBCASE("Epanechnikov is unsupported analytically") {
        std::vector<double> y(15);
        for (auto& v : y) v = rng.normal();
        std::vector<double> lam{1.0, 1.0};
        try {
            (void)mekro_gradient(lam, X, y, KernelSpec{KernelFamily::Epanechnikov});
            FAIL("expected Unsupported");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Unsupported);
        }
    }

    SUBCASE("d=1 chain rule: dRSS/dlambda = -h^2 dRSS/dh") {
        Matrix X1(15, 1);
        for (std::size_t i = 0; i < 15; ++i) X1(i, 0) = X(i, 0);
        std::vector<double> y(15);
        for (auto& v : y) v = rng.normal();
        const double h = 0.5;
        std::vector<double> lam{1.0 / h};
        const auto g = mekro_gradient(lam, X1, y, gauss);
        // numeric dRSS/dh via the bandwidth parameterization
        const double eps = 1e-6;
        const auto rss_at = [&](double hh) {
            std::vector<double> l{1.0 / hh};
            return mekro_objective(l, X1, y, gauss);
        };
        const double drss_dh = (rss_at(h + eps) - rss_at(h - eps)) / (2.0 * eps);
        CHECK(g[0] == doctest::Approx(-h * h * drss_dh).epsilon(1e-4));
    }
}

TEST_CASE("project_feasible") {
    SUBCASE("clamp only") {
        const auto out = project_feasible({-0.2, 0.5}, 10.0);
        CHECK(out == std::vector<double>{0.0, 0.5});
    }

    SUBCASE("simplex face with quadratic-program grid oracle") {
        const auto out = project_feasible({0.5, 0.7}, 1.0);
        CHECK(out[0] == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(out[1] == doctest::Approx(0.6).epsilon(1e-12));

        // brute-force check on a fine feasible grid: nothing is closer
        const double d0 = (out[0] - 0.5) * (out[0] - 0.5) + (out[1] - 0.7) * (out[1] - 0.7);
        for (double a = 0.0; a <= 1.0; a += 1e-3) {
            for (double b = 0.0; a + b <= 1.0; b += 1e-3) {
                const double d = (a - 0.5) * (a - 0.5) + (b - 0.7) * (b - 0.7);
                CHECK(d >= d0 - 1e-9);
            }
        }
    }

    SUBCASE("idempotence on feasible points") {
        Rng rng(55);
        for (int rep = 0; rep < 200; ++rep) {
            const std::size_t d = 1 + rng.below(6);
            const double xi = 0.5 + 4.0 * rng.uniform01();
            std::vector<double> lam(d);
            double s = 0.0;
            for (auto& l : lam) {
                l = rng.uniform01();
                s += l;
            }
            for (auto& l : lam) l *= 0.99 * xi / std::max(s, 1.0); // feasible
            const auto out = project_feasible(lam, xi);
            CHECK(out == lam);
        }
    }

    SUBCASE("feasibility and local optimality on 1000 random instances") {
        Rng rng(66);
        for (int rep = 0; rep < 1000; ++rep) {
            const std::size_t d = 1 + rng.below(5);
            const double xi = 0.2 + 3.0 * rng.uniform01();
            std::vector<double> lam(d);
            for (auto& l : lam) l = 4.0 * (rng.uniform01() - 0.3);
            const auto out = project_feasible(lam, xi);
            double sum = 0.0;
            for (double l : out) {
                CHECK(l >= 0.0);
                sum += l;
            }
            CHECK(sum <= xi * (1.0 + 1e-10));
            // no feasible grid neighbor is closer to the input
            const auto dist = [&](const std::vector<double>& v) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += (v[j] - lam[j]) * (v[j] - lam[j]);
                return s;
            };
            const double base = dist(out);
            for (std::size_t j = 0; j < d; ++j) {
                for (double delta : {-1e-3, 1e-3}) {
                    auto nb = out;
                    nb[j] += delta;
                    double s = 0.0;
                    bool ok = true;
                    for (double l : nb) {
                        ok = ok && l >= 0.0;
                        s += l;
                    }
                    if (ok && s <= xi) CHECK(dist(nb) >= base - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("mekro_bic transcription") {
    // n=100, objective=80, trace=4
    const double want = 100.0 * std::log(80.0 / 100.0) + std::log(100.0) * 4.0;
    CHECK(mekro_bic(100, 80.0, 4.0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(mekro_bic(100, 80.0, 4.0) == doctest::Approx(-3.8937).epsilon(1e-4));
}

TEST_CASE("mekro_fit") {
    KernelSpec gauss;
    MekroConfig cfg;
    Rng rng(500);
    const std::size_t n = 120;
    Matrix X = random_design(n, 3, rng);
    const auto y = quadratic_response(X, 0.2, rng);

    SUBCASE("tiny budget collapses to the null fit") {
        const auto model = mekro_fit(X, y, 1e-8, cfg, gauss);
        const double ybar = oracle::mean(y);
        CHECK(model.objective == doctest::Approx(tss_of(y)).epsilon(1e-6));
        for (double f : model.fitted) CHECK(f == doctest::Approx(ybar).epsilon(1e-8));
        CHECK(model.selected.empty());
        CHECK(model.trace == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("signal variable is selected with a generous budget") {
        const auto model = mekro_fit(X, y, 12.0, cfg, gauss);
        CHECK(std::find(model.selected.begin(), model.selected.end(), 0u) !=
              model.selected.end());
        // invariants
        double sum = 0.0;
        for (double l : model.lambda) {
            CHECK(l >= 0.0);
            sum += l;
        }
        CHECK(sum <= 12.0 * (1.0 + 1e-10));
        CHECK(model.objective <= tss_of(y));
        CHECK(model.objective ==
              doctest::Approx(mekro_objective(model.lambda, X, y, gauss)).epsilon(1e-12));
        CHECK(model.bic ==
              doctest::Approx(mekro_bic(n, model.objective, model.trace)).epsilon(1e-12));
    }

    SUBCASE("Epanechnikov path works through finite differences") {
        KernelSpec epan{KernelFamily::Epanechnikov};
        const auto model = mekro_fit(X, y, 8.0, cfg, epan);
        CHECK(model.objective <= tss_of(y) + 1e-9);
    }
}

TEST_CASE("mekro_bic_path") {
    KernelSpec gauss;
    MekroConfig cfg;

    SUBCASE("objectives are non-increasing along the grid") {
        Rng rng(600);
        Matrix X = random_design(90, 2, rng);
        const auto y = quadratic_response(X, 0.5, rng);
        const auto out = mekro_bic_path(X, y, cfg, gauss);
        CHECK(out.path.size() == 16);
        for (std::size_t g = 1; g < out.path.size(); ++g) {
            CHECK(out.path[g].objective <= out.path[g - 1].objective + 1e-9);
            CHECK(out.path[g].xi > out.path[g - 1].xi);
        }
        double best = out.path.front().bic;
        for (const auto& m : out.path) best = std::min(best, m.bic);
        CHECK(out.best.bic == best);
    }

    SUBCASE("pure noise prefers the null-ish model") {
        Rng rng(700);
        Matrix X = random_design(100, 3, rng);
        std::vector<double> y(100);
        for (auto& v : y) v = rng.normal();
        const auto out = mekro_bic_path(X, y, cfg, gauss);
        CHECK((out.best.selected.empty() || out.best.trace < 2.5));
    }

    SUBCASE("custom grid is respected and the warm start keeps support alive") {
        Rng rng(800);
        Matrix X = random_design(80, 2, rng);
        const auto y = quadratic_response(X, 0.3, rng);
        MekroConfig c2 = cfg;
        c2.xi_grid = {1.0, 2.0, 4.0};
        std::vector<double> warm{3.0, 0.2};
        const auto out = mekro_bic_path(X, y, c2, gauss, warm);
        CHECK(out.path.size() == 3);
        CHECK(out.path[0].xi == 1.0);
        CHECK(out.path[2].xi == 4.0);
    }
}

TEST_CASE("d=1 budget sweep reproduces the dense bandwidth-grid minimum") {
    KernelSpec gauss;
    Rng rng(900);
    const std::size_t n = 100;
    Matrix X(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = rng.uniform01();
        y[i] = std::sin(2.0 * M_PI * X(i, 0)) + 0.3 * rng.normal();
    }

    // dense grid over the bandwidths implied by lambda in (0, xi]
    const double xi = 8.0;
    double grid_best = tss_of(y);
    for (double lam = 0.02; lam <= xi; lam += 0.02) {
        std::vector<double> l{lam};
        grid_best = std::min(grid_best, mekro_objective(l, X, y, gauss));
    }
    MekroConfig cfg;
    const auto model = mekro_fit(X, y, xi, cfg, gauss);
    CHECK(model.objective <= grid_best * 1.02);
}
