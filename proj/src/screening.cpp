#include "fbis/screening.hpp"

#include <algorithm>
#include <cmath>

#include "fbis/parallel.hpp"
#include "fbis/rng.hpp"
#include "fbis/smoothing.hpp"

namespace fbis {

namespace detail {

double rate_log(std::size_t n, std::size_t p, RateDimension rate) {
    if (rate == RateDimension::UseP) {
        if (p < 2)
            throw Error(ErrorCode::InvalidDimension, "log p rate requires p >= 2");
        return std::log(static_cast<double>(p));
    }
    if (n < 2) throw Error(ErrorCode::InvalidDimension, "log n rate requires n >= 2");
    return std::log(static_cast<double>(n));
}

double total_sum_squares(std::span<const double> y) {
    const double m = mean_of(y);
    double tss = 0.0;
    for (double v : y) {
        const double r = v - m;
        tss += r * r;
    }
    return tss;
}

std::vector<std::size_t> order_by_score_desc(const std::vector<double>& score) {
    std::vector<std::size_t> idx(score.size());
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(), [&score](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    return idx;
}

// Lower empirical quantile: 1-based index ceil(q*m); nullopt means maximum.
double lower_quantile(std::vector<double> values, std::optional<double> q) {
    if (values.empty()) throw Error(ErrorCode::EmptyData, "quantile of empty sample");
    if (!q) return *std::max_element(values.begin(), values.end());
    if (*q < 0.0 || *q >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "quantile level must lie in [0,1)");
    std::sort(values.begin(), values.end());
    const double m = static_cast<double>(values.size());
    const std::size_t rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(*q * m)));
    return values[rank - 1];
}

} // namespace detail

namespace {

struct PenaltyScale {
    double h_star = 0.0;
    double L = 0.0;
    double unit = 0.0; // sqrt(L/n) * sqrt(h*)
};

PenaltyScale penalty_scale(std::size_t n, std::size_t p, RateDimension rate) {
    PenaltyScale s;
    s.L = detail::rate_log(n, p, rate);
    s.h_star = std::pow(s.L / static_cast<double>(n), 0.2);
    s.unit = std::sqrt(s.L / static_cast<double>(n)) * std::sqrt(s.h_star);
    return s;
}

double im_from_smooth(double tss, double rss, double trace, double unit, std::size_t n) {
    const double nn = static_cast<double>(n);
    return (std::log(tss / nn) - std::log(rss / nn)) / (trace * unit);
}

// IMs for every column of X against y at bandwidth h (parallel over columns).
// Columns flagged constant get IM = 0 without smoothing.
std::vector<double> ims_for_matrix(const Matrix& X, std::span<const double> y,
                                   const std::vector<bool>& constant, const PenaltyScale& s,
                                   KernelFamily family, double tss) {
    const std::size_t n = X.rows(), p = X.cols();
    std::vector<double> ims(p, 0.0);
    parallel_for(p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            if (constant[j]) continue;
            const auto ds = detail::smooth_design_uni(X.col(j), y, s.h_star, family);
            if (ds.rss <= 0.0)
                throw Error(ErrorCode::DegenerateFit,
                            "marginal fit interpolates variable " + std::to_string(j + 1));
            ims[j] = im_from_smooth(tss, ds.rss, ds.trace, s.unit, n);
        }
    });
    return ims;
}

std::vector<double> permuted_ims(const Matrix& X, std::span<const double> y,
                                 const std::vector<bool>& constant, const PenaltyScale& s,
                                 KernelFamily family, double tss, std::uint64_t seed,
                                 std::size_t n_permutations) {
    const std::size_t n = X.rows(), p = X.cols();
    std::vector<double> pool(p * n_permutations, 0.0);
    for (std::size_t r = 0; r < n_permutations; ++r) {
        Rng rng(sub_seed(seed, seed_tag::permutation, r));
        const auto perm = random_permutation(n, rng);
        parallel_for(p, [&](std::size_t begin, std::size_t end) {
            std::vector<double> xperm(n);
            for (std::size_t j = begin; j < end; ++j) {
                if (constant[j]) continue;
                auto src = X.col(j);
                for (std::size_t i = 0; i < n; ++i) xperm[i] = src[perm[i]];
                const auto ds = detail::smooth_design_uni(xperm, y, s.h_star, family);
                if (ds.rss <= 0.0)
                    throw Error(ErrorCode::DegenerateFit, "permuted fit interpolates");
                pool[r * p + j] = im_from_smooth(tss, ds.rss, ds.trace, s.unit, n);
            }
        });
    }
    return pool;
}

struct ScreenInputs {
    Matrix X; // rescaled when requested
    std::vector<bool> constant;
};

ScreenInputs prepare_inputs(const Dataset& data, const ScreeningConfig& cfg) {
    ScreenInputs in;
    const RescaleInfo info = compute_rescale(data.X);
    in.constant.resize(data.p());
    for (std::size_t j = 0; j < data.p(); ++j) in.constant[j] = info.constant(j);
    in.X = cfg.rescale ? info.apply(data.X) : data.X;
    return in;
}

} // namespace

double h_star(std::size_t n, std::size_t p, RateDimension rate) {
    if (n < 2) throw Error(ErrorCode::InvalidDimension, "h_star requires n >= 2");
    const double L = detail::rate_log(n, p, rate);
    return std::pow(L / static_cast<double>(n), 0.2);
}

double ic_infinity(std::span<const double> y) {
    const double tss = detail::total_sum_squares(y);
    if (tss <= 0.0) throw Error(ErrorCode::DegenerateResponse, "response is constant");
    return std::log(tss / static_cast<double>(y.size()));
}

double ic(std::span<const double> x_j, std::span<const double> y, Bandwidth h,
          const ScreeningConfig& cfg, std::size_t p) {
    if (h.is_infinite()) return ic_infinity(y);
    const std::size_t n = y.size();
    if (x_j.size() != n) throw Error(ErrorCode::InvalidDimension, "x and y length mismatch");
    detail::require_finite(x_j, "x");
    detail::require_finite(y, "y");
    const double L = detail::rate_log(n, p, cfg.rate);
    const auto ds = detail::smooth_design_uni(x_j, y, h.value(), cfg.kernel.family);
    if (ds.rss <= 0.0)
        throw Error(ErrorCode::DegenerateResponse, "zero residual sum of squares");
    const double nn = static_cast<double>(n);
    return std::log(ds.rss / nn) +
           cfg.tau * (ds.trace - 1.0) * std::sqrt(L / nn) * std::sqrt(h.value());
}

double importance_measure(std::span<const double> x_j, std::span<const double> y, double h_star,
                          std::size_t p, const ScreeningConfig& cfg) {
    const std::size_t n = y.size();
    if (x_j.size() != n) throw Error(ErrorCode::InvalidDimension, "x and y length mismatch");
    if (!(h_star > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_star must be > 0");
    detail::require_finite(x_j, "x");
    detail::require_finite(y, "y");
    const double tss = detail::total_sum_squares(y);
    if (tss <= 0.0) throw Error(ErrorCode::DegenerateResponse, "response is constant");
    const double L = detail::rate_log(n, p, cfg.rate);
    const auto ds = detail::smooth_design_uni(x_j, y, h_star, cfg.kernel.family);
    if (ds.rss <= 0.0) throw Error(ErrorCode::DegenerateFit, "marginal fit interpolates");
    const double unit = std::sqrt(L / static_cast<double>(n)) * std::sqrt(h_star);
    return im_from_smooth(tss, ds.rss, ds.trace, unit, n);
}

std::vector<std::size_t> fbis_hard_select(const Dataset& data, const ScreeningConfig& cfg) {
    const auto in = prepare_inputs(data, cfg);
    const std::size_t n = data.n(), p = data.p();
    const auto s = penalty_scale(n, p, cfg.rate);
    const double ic_inf = ic_infinity(data.y);

    std::vector<char> favored(p, 0);
    parallel_for(p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            if (in.constant[j]) continue;
            const auto ds = detail::smooth_design_uni(in.X.col(j), data.y, s.h_star,
                                                      cfg.kernel.family);
            if (ds.rss <= 0.0)
                throw Error(ErrorCode::DegenerateResponse,
                            "zero RSS at variable " + std::to_string(j + 1));
            const double nn = static_cast<double>(n);
            const double icj =
                std::log(ds.rss / nn) + cfg.tau * (ds.trace - 1.0) * s.unit;
            favored[j] = icj < ic_inf ? 1 : 0;
        }
    });

    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < p; ++j)
        if (favored[j]) out.push_back(j);
    return out;
}

std::pair<double, std::vector<double>> permutation_threshold(const Dataset& data,
                                                             const ScreeningConfig& cfg) {
    if (cfg.n_permutations == 0)
        throw Error(ErrorCode::InvalidArgument, "n_permutations must be positive");
    const auto in = prepare_inputs(data, cfg);
    const auto s = penalty_scale(data.n(), data.p(), cfg.rate);
    const double tss = detail::total_sum_squares(data.y);
    if (tss <= 0.0) throw Error(ErrorCode::DegenerateResponse, "response is constant");
    auto pool = permuted_ims(in.X, data.y, in.constant, s, cfg.kernel.family, tss, cfg.seed,
                             cfg.n_permutations);
    const double omega = detail::lower_quantile(pool, cfg.q);
    return {omega, std::move(pool)};
}

ScreeningReport fbis_screen(const Dataset& data, const ScreeningConfig& cfg) {
    if (cfg.n_permutations == 0)
        throw Error(ErrorCode::InvalidArgument, "n_permutations must be positive");
    const auto in = prepare_inputs(data, cfg);
    const std::size_t n = data.n(), p = data.p();
    const auto s = penalty_scale(n, p, cfg.rate);
    const double tss = detail::total_sum_squares(data.y);
    if (tss <= 0.0) throw Error(ErrorCode::DegenerateResponse, "response is constant");

    ScreeningReport report;
    report.h_star = s.h_star;
    report.ic_inf = std::log(tss / static_cast<double>(n));
    report.variables.resize(p);

    parallel_for(p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            VariableScore& v = report.variables[j];
            if (in.constant[j]) {
                v.constant = true;
                v.ic_hstar = report.ic_inf;
                continue;
            }
            const auto ds = detail::smooth_design_uni(in.X.col(j), data.y, s.h_star,
                                                      cfg.kernel.family);
            if (ds.rss <= 0.0)
                throw Error(ErrorCode::DegenerateFit,
                            "marginal fit interpolates variable " + std::to_string(j + 1));
            const double nn = static_cast<double>(n);
            v.im = im_from_smooth(tss, ds.rss, ds.trace, s.unit, n);
            v.ic_hstar = std::log(ds.rss / nn) + cfg.tau * (ds.trace - 1.0) * s.unit;
            v.favored_hstar = v.ic_hstar < report.ic_inf;
        }
    });

    report.permutation_ims = permuted_ims(in.X, data.y, in.constant, s, cfg.kernel.family, tss,
                                          cfg.seed, cfg.n_permutations);
    report.omega_q = detail::lower_quantile(report.permutation_ims, cfg.q);

    std::vector<double> ims(p);
    for (std::size_t j = 0; j < p; ++j) ims[j] = report.variables[j].im;
    report.ranking = detail::order_by_score_desc(ims);
    for (std::size_t j : report.ranking)
        if (ims[j] >= report.omega_q) report.selected.push_back(j);
    return report;
}

std::vector<std::size_t> ScreeningReport::top_k(std::size_t k) const {
    const std::size_t m = std::min(k, ranking.size());
    return {ranking.begin(), ranking.begin() + m};
}

std::vector<std::size_t> fbis_rank(const Dataset& data, const ScreeningConfig& cfg,
                                   std::vector<double>* ims_out) {
    const auto in = prepare_inputs(data, cfg);
    const auto s = penalty_scale(data.n(), data.p(), cfg.rate);
    const double tss = detail::total_sum_squares(data.y);
    if (tss <= 0.0) throw Error(ErrorCode::DegenerateResponse, "response is constant");
    auto ims = ims_for_matrix(in.X, data.y, in.constant, s, cfg.kernel.family, tss);
    auto order = detail::order_by_score_desc(ims);
    if (ims_out) *ims_out = std::move(ims);
    return order;
}

std::vector<std::size_t> sis_rank(const Dataset& data) {
    const std::size_t n = data.n(), p = data.p();
    const double ybar = detail::mean_of(data.y);
    double syy = 0.0;
    for (double v : data.y) syy += (v - ybar) * (v - ybar);

    std::vector<double> score(p, 0.0);
    parallel_for(p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            auto x = data.X.col(j);
            double xbar = detail::mean_of(x);
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = x[i] - xbar;
                sxx += dx * dx;
                sxy += dx * (data.y[i] - ybar);
            }
            score[j] = (sxx > 0.0 && syy > 0.0) ? std::fabs(sxy / std::sqrt(sxx * syy)) : 0.0;
        }
    });
    return detail::order_by_score_desc(score);
}

} // namespace fbis
