#include "fbis/smoothing.hpp"

#include <algorithm>
#include <cmath>

namespace fbis {

namespace detail {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN/Inf");
}

DesignSmooth smooth_design_uni(std::span<const double> x, std::span<const double> y,
                               double h, KernelFamily family) {
    const std::size_t n = x.size();
    const double inv_h = 1.0 / h;
    std::vector<double> w_sum(n, 1.0); // self weight, kernel_unnorm(0) == 1
    std::vector<double> wy_sum(n);
    for (std::size_t i = 0; i < n; ++i) wy_sum[i] = y[i];

    if (family == KernelFamily::Gaussian) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double xi = x[i], yi = y[i];
            for (std::size_t k = i + 1; k < n; ++k) {
                const double u = (xi - x[k]) * inv_h;
                const double w = std::exp(-0.5 * u * u);
                w_sum[i] += w;
                w_sum[k] += w;
                wy_sum[i] += w * y[k];
                wy_sum[k] += w * yi;
            }
        }
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double xi = x[i], yi = y[i];
            for (std::size_t k = i + 1; k < n; ++k) {
                const double u = (xi - x[k]) * inv_h;
                const double t = 1.0 - u * u;
                if (t <= 0.0) continue;
                w_sum[i] += t;
                w_sum[k] += t;
                wy_sum[i] += t * y[k];
                wy_sum[k] += t * yi;
            }
        }
    }

    DesignSmooth out;
    out.fitted.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.fitted[i] = wy_sum[i] / w_sum[i];
        out.trace += 1.0 / w_sum[i];
        const double r = y[i] - out.fitted[i];
        out.rss += r * r;
    }
    return out;
}

DesignSmooth smooth_design_product(const Matrix& X, std::span<const std::size_t> cols,
                                   std::span<const double> lambda, std::span<const double> y,
                                   KernelFamily family) {
    const std::size_t n = X.rows();
    std::vector<std::size_t> active;
    std::vector<double> coef; // lambda^2 / 2 for Gaussian, lambda for Epanechnikov
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (lambda[j] != 0.0) {
            active.push_back(cols[j]);
            coef.push_back(family == KernelFamily::Gaussian ? 0.5 * lambda[j] * lambda[j]
                                                            : lambda[j]);
        }
    }

    DesignSmooth out;
    out.fitted.resize(n);
    if (active.empty()) {
        // all bandwidths infinite: fit is exactly the sample mean, trace 1
        const double m = mean_of(y);
        std::fill(out.fitted.begin(), out.fitted.end(), m);
        out.trace = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - m;
            out.rss += r * r;
        }
        return out;
    }

    std::vector<double> w_sum(n, 1.0);
    std::vector<double> wy_sum(n);
    for (std::size_t i = 0; i < n; ++i) wy_sum[i] = y[i];

    const std::size_t d = active.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double yi = y[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            double w;
            if (family == KernelFamily::Gaussian) {
                double acc = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    const double dx = X(i, active[a]) - X(k, active[a]);
                    acc += coef[a] * dx * dx;
                }
                w = std::exp(-acc);
            } else {
                w = 1.0;
                for (std::size_t a = 0; a < d; ++a) {
                    const double u = (X(i, active[a]) - X(k, active[a])) * coef[a];
                    const double t = 1.0 - u * u;
                    if (t <= 0.0) {
                        w = 0.0;
                        break;
                    }
                    w *= t;
                }
                if (w == 0.0) continue;
            }
            w_sum[i] += w;
            w_sum[k] += w;
            wy_sum[i] += w * y[k];
            wy_sum[k] += w * yi;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        out.fitted[i] = wy_sum[i] / w_sum[i];
        out.trace += 1.0 / w_sum[i];
        const double r = y[i] - out.fitted[i];
        out.rss += r * r;
    }
    return out;
}

} // namespace detail

std::vector<double> nw_fit(std::span<const double> x, std::span<const double> y, Bandwidth h,
                           KernelSpec spec, std::span<const double> eval_points) {
    if (x.empty()) throw Error(ErrorCode::EmptyData, "nw_fit needs at least one sample");
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidDimension, "x and y length mismatch");
    detail::require_finite(x, "x");
    detail::require_finite(y, "y");
    detail::require_finite(eval_points, "eval_points");

    const std::size_t n = x.size(), m = eval_points.size();
    std::vector<double> out(m);
    const double ybar = detail::mean_of(y);
    if (h.is_infinite()) {
        std::fill(out.begin(), out.end(), ybar);
        return out;
    }
    const double inv_h = 1.0 / h.value();
    const bool compact = spec.family == KernelFamily::Epanechnikov;
    for (std::size_t e = 0; e < m; ++e) {
        double w_sum = 0.0, wy_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = kernel_unnorm((x[i] - eval_points[e]) * inv_h, spec.family);
            w_sum += w;
            wy_sum += w * y[i];
        }
        const bool degenerate = compact ? (w_sum == 0.0) : (w_sum < kWeightFloor);
        out[e] = degenerate ? ybar : wy_sum / w_sum;
    }
    return out;
}

SmootherSummary smoother_summary(std::span<const double> x, std::span<const double> y, Bandwidth h,
                                 KernelSpec spec) {
    if (x.empty()) throw Error(ErrorCode::EmptyData, "smoother_summary needs at least one sample");
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidDimension, "x and y length mismatch");
    detail::require_finite(x, "x");
    detail::require_finite(y, "y");

    SmootherSummary out;
    if (h.is_infinite()) {
        out.fitted.assign(x.size(), detail::mean_of(y));
        out.trace = 1.0;
        return out;
    }
    // With the self weight included every row denominator is >= kernel_unnorm(0) = 1,
    // so no design row can degenerate; the summary keeps the counter for contract parity.
    auto ds = detail::smooth_design_uni(x, y, h.value(), spec.family);
    out.fitted = std::move(ds.fitted);
    out.trace = ds.trace;
    return out;
}

std::vector<double> nw_fit_product(const Matrix& X, std::span<const double> y,
                                   const std::vector<Bandwidth>& h, KernelSpec spec,
                                   const Matrix& eval_points) {
    const std::size_t n = X.rows(), d = X.cols(), m = eval_points.rows();
    if (n == 0) throw Error(ErrorCode::EmptyData, "nw_fit_product needs at least one sample");
    if (d == 0 || h.size() != d || eval_points.cols() != d)
        throw Error(ErrorCode::InvalidDimension, "inconsistent dimensions in nw_fit_product");
    if (y.size() != n) throw Error(ErrorCode::InvalidDimension, "y length mismatch");
    detail::require_finite(X.data(), "X");
    detail::require_finite(y, "y");
    detail::require_finite(eval_points.data(), "eval_points");

    const double ybar = detail::mean_of(y);
    std::vector<double> out(m);

    std::vector<std::size_t> active;
    std::vector<double> inv_h;
    for (std::size_t j = 0; j < d; ++j) {
        if (!h[j].is_infinite()) {
            active.push_back(j);
            inv_h.push_back(1.0 / h[j].value());
        }
    }
    if (active.empty()) {
        std::fill(out.begin(), out.end(), ybar);
        return out;
    }

    const bool compact = spec.family == KernelFamily::Epanechnikov;
    for (std::size_t e = 0; e < m; ++e) {
        double w_sum = 0.0, wy_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double w = 1.0;
            for (std::size_t a = 0; a < active.size(); ++a) {
                const std::size_t j = active[a];
                w *= kernel_unnorm((X(i, j) - eval_points(e, j)) * inv_h[a], spec.family);
                if (w == 0.0) break;
            }
            w_sum += w;
            wy_sum += w * y[i];
        }
        const bool degenerate = compact ? (w_sum == 0.0) : (w_sum < kWeightFloor);
        out[e] = degenerate ? ybar : wy_sum / w_sum;
    }
    return out;
}

double smoother_trace_product(const Matrix& X, const std::vector<Bandwidth>& h, KernelSpec spec) {
    const std::size_t n = X.rows(), d = X.cols();
    if (n == 0) throw Error(ErrorCode::EmptyData, "smoother_trace_product needs samples");
    if (d == 0 || h.size() != d)
        throw Error(ErrorCode::InvalidDimension, "inconsistent dimensions in smoother_trace_product");
    detail::require_finite(X.data(), "X");

    std::vector<std::size_t> cols;
    std::vector<double> lambda;
    bool any_finite = false;
    for (std::size_t j = 0; j < d; ++j) {
        cols.push_back(j);
        lambda.push_back(h[j].inverse());
        any_finite = any_finite || !h[j].is_infinite();
    }
    if (!any_finite) return 1.0;

    std::vector<double> dummy(n, 0.0);
    return detail::smooth_design_product(X, cols, lambda, dummy, spec.family).trace;
}

} // namespace fbis
