#pragma once

#include <span>
#include <vector>

#include "fbis/kernel.hpp"
#include "fbis/matrix.hpp"

namespace fbis {

// Row denominator floor: below it the fit falls back to mean(y) and the row
// is counted as degenerate. Compact kernels degenerate at exactly zero.
inline constexpr double kWeightFloor = 1e-300;

struct SmootherSummary {
    std::vector<double> fitted;
    double trace = 0.0;
    std::size_t degenerate_rows = 0;

    bool operator==(const SmootherSummary&) const = default;
};

// Univariate Nadaraya-Watson fit evaluated at arbitrary points.
std::vector<double> nw_fit(std::span<const double> x, std::span<const double> y, Bandwidth h,
                           KernelSpec spec, std::span<const double> eval_points);

// Fit at the design points plus the smoother-matrix trace (self-weight included).
SmootherSummary smoother_summary(std::span<const double> x, std::span<const double> y, Bandwidth h,
                                 KernelSpec spec);

// Product-kernel multivariate NW fit; coordinates with infinite bandwidth drop out.
std::vector<double> nw_fit_product(const Matrix& X, std::span<const double> y,
                                   const std::vector<Bandwidth>& h, KernelSpec spec,
                                   const Matrix& eval_points);

double smoother_trace_product(const Matrix& X, const std::vector<Bandwidth>& h, KernelSpec spec);

namespace detail {

// Design-point smooth of one column: fitted values, trace and RSS in one
// O(n^2) pass over symmetric pairs. The workhorse behind IC/IM screening.
struct DesignSmooth {
    std::vector<double> fitted;
    double trace = 0.0;
    double rss = 0.0;
};

DesignSmooth smooth_design_uni(std::span<const double> x, std::span<const double> y,
                               double h, KernelFamily family);

// Same for a product kernel over selected columns with inverse bandwidths
// lambda (0 = infinite). `cols` indexes into X.
DesignSmooth smooth_design_product(const Matrix& X, std::span<const std::size_t> cols,
                                   std::span<const double> lambda, std::span<const double> y,
                                   KernelFamily family);

double mean_of(std::span<const double> v);
void require_finite(std::span<const double> v, const char* what);

} // namespace detail
} // namespace fbis
