#pragma once

// Brute-force reference implementations used to freeze expected values.
// Everything here is written directly from the defining formulas with
// normalized kernels and explicit matrices; nothing calls into the library
// paths under test.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "fbis/matrix.hpp"

namespace oracle {

inline double kernel_normalized(double u, bool gaussian) {
    if (gaussian) return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
    return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

// K_h(x) = K(x/h)/h
inline double scaled_kernel(double x, double h, bool gaussian) {
    return kernel_normalized(x / h, gaussian) / h;
}

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Direct double-loop Nadaraya-Watson at arbitrary evaluation points.
// h = nullopt means the infinite bandwidth (global mean).
inline std::vector<double> nw(std::span<const double> x, std::span<const double> y,
                              std::optional<double> h, std::span<const double> evals,
                              bool gaussian = true) {
    std::vector<double> out(evals.size());
    const double ybar = mean(y);
    for (std::size_t e = 0; e < evals.size(); ++e) {
        if (!h) {
            out[e] = ybar;
            continue;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = scaled_kernel(x[i] - evals[e], *h, gaussian);
            num += w * y[i];
            den += w;
        }
        out[e] = den > 0.0 ? num / den : ybar;
    }
    return out;
}

// Full n x n smoother matrix (row-major), self weight included.
inline std::vector<double> smoother_matrix(std::span<const double> x, double h,
                                           bool gaussian = true) {
    const std::size_t n = x.size();
    std::vector<double> S(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0.0;
        for (std::size_t l = 0; l < n; ++l) den += scaled_kernel(x[l] - x[i], h, gaussian);
        for (std::size_t k = 0; k < n; ++k)
            S[i * n + k] = scaled_kernel(x[k] - x[i], h, gaussian) / den;
    }
    return S;
}

inline double trace_of(const std::vector<double>& S, std::size_t n) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += S[i * n + i];
    return t;
}

inline std::vector<double> apply_matrix(const std::vector<double>& S, std::span<const double> y) {
    const std::size_t n = y.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out[i] += S[i * n + k] * y[k];
    return out;
}

// Memory-light trace for large n: per-row normalized denominators.
inline double trace_direct(std::span<const double> x, double h, bool gaussian = true) {
    const std::size_t n = x.size();
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0.0;
        for (std::size_t l = 0; l < n; ++l) den += scaled_kernel(x[l] - x[i], h, gaussian);
        t += scaled_kernel(0.0, h, gaussian) / den;
    }
    return t;
}

// Product-kernel NW by triple loop; per-coordinate optional bandwidths.
inline std::vector<double> nw_product(const fbis::Matrix& X, std::span<const double> y,
                                      const std::vector<std::optional<double>>& h,
                                      const fbis::Matrix& evals, bool gaussian = true) {
    const std::size_t n = X.rows(), d = X.cols(), m = evals.rows();
    std::vector<double> out(m);
    const double ybar = mean(y);
    for (std::size_t e = 0; e < m; ++e) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double w = 1.0;
            for (std::size_t j = 0; j < d; ++j)
                if (h[j]) w *= scaled_kernel(X(i, j) - evals(e, j), *h[j], gaussian);
            num += w * y[i];
            den += w;
        }
        out[e] = den > 0.0 ? num / den : ybar;
    }
    return out;
}

inline double trace_product(const fbis::Matrix& X, const std::vector<std::optional<double>>& h,
                            bool gaussian = true) {
    const std::size_t n = X.rows(), d = X.cols();
    bool any = false;
    for (const auto& hj : h) any = any || hj.has_value();
    if (!any) return 1.0;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0.0, self = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            double w = 1.0;
            for (std::size_t j = 0; j < d; ++j)
                if (h[j]) w *= scaled_kernel(X(k, j) - X(i, j), *h[j], gaussian);
            den += w;
        }
        for (std::size_t j = 0; j < d; ++j)
            if (h[j]) self *= scaled_kernel(0.0, *h[j], gaussian);
        t += self / den;
    }
    return t;
}

inline double rss_of(std::span<const double> y, std::span<const double> fit) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fit[i];
        s += r * r;
    }
    return s;
}

// Information criterion transcription: log(RSS/n) + tau*(tr-1)*sqrt(L/n)*sqrt(h)
inline double ic_formula(std::span<const double> x, std::span<const double> y, double h,
                         double tau, double L, bool gaussian = true) {
    const std::size_t n = y.size();
    const auto S = smoother_matrix(x, h, gaussian);
    const auto fit = apply_matrix(S, y);
    const double rss = rss_of(y, fit);
    const double tr = trace_of(S, n);
    return std::log(rss / static_cast<double>(n)) +
           tau * (tr - 1.0) * std::sqrt(L / static_cast<double>(n)) * std::sqrt(h);
}

// Importance measure transcription (denominator uses tr, not tr-1).
inline double im_formula(std::span<const double> x, std::span<const double> y, double hstar,
                         double L, bool gaussian = true) {
    const std::size_t n = y.size();
    const auto S = smoother_matrix(x, hstar, gaussian);
    const auto fit = apply_matrix(S, y);
    const double rss = rss_of(y, fit);
    const double tr = trace_of(S, n);
    std::vector<double> dev(n);
    const double yb = mean(y);
    for (std::size_t i = 0; i < n; ++i) dev[i] = yb;
    const double tss = rss_of(y, dev);
    const double nn = static_cast<double>(n);
    return (std::log(tss / nn) - std::log(rss / nn)) /
           (tr * std::sqrt(L / nn) * std::sqrt(hstar));
}

// Conditional importance transcription using bivariate product smoothers.
inline double conditional_im_formula(std::span<const double> z, std::span<const double> x,
                                     std::span<const double> y, double hstar, double L,
                                     bool gaussian = true) {
    const std::size_t n = y.size();
    fbis::Matrix ZX(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        ZX(i, 0) = z[i];
        ZX(i, 1) = x[i];
    }
    std::vector<std::optional<double>> both{hstar, hstar};
    std::vector<std::optional<double>> zonly{hstar, std::nullopt};
    const auto fit_both = nw_product(ZX, y, both, ZX, gaussian);
    const auto fit_z = nw_product(ZX, y, zonly, ZX, gaussian);
    const double rss_both = rss_of(y, fit_both);
    const double rss_z = rss_of(y, fit_z);
    const double tr_both = trace_product(ZX, both, gaussian);
    const double tr_z = trace_product(ZX, zonly, gaussian);
    const double nn = static_cast<double>(n);
    return (std::log(rss_z / nn) - std::log(rss_both / nn)) /
           ((tr_both - tr_z) * std::sqrt(L / nn) * std::sqrt(hstar));
}

// Product-kernel residual sum of squares at the design points for inverse
// bandwidths lambda (0 = infinite coordinate).
inline double mekro_rss_formula(const fbis::Matrix& X, std::span<const double> y,
                                std::span<const double> lambda, bool gaussian = true) {
    std::vector<std::optional<double>> h(lambda.size());
    for (std::size_t j = 0; j < lambda.size(); ++j)
        h[j] = lambda[j] == 0.0 ? std::optional<double>{} : std::optional<double>{1.0 / lambda[j]};
    const auto fit = nw_product(X, y, h, X, gaussian);
    return rss_of(y, fit);
}

} // namespace oracle
