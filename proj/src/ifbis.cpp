#include "fbis/ifbis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbis/parallel.hpp"
#include "fbis/rng.hpp"
#include "fbis/smoothing.hpp"

namespace fbis {

namespace {

// Bivariate conditional scorer with the Z-factor weights shared across all
// candidate columns: per column only one extra kernel factor per pair.
class CondScorer {
public:
    CondScorer(std::span<const double> z, std::span<const double> y, double h,
               KernelFamily family)
        : n_(z.size()), inv_h_(1.0 / h), family_(family), y_(y.begin(), y.end()) {
        const std::size_t pairs = n_ * (n_ - 1) / 2;
        wz_.resize(pairs);
        std::size_t t = 0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double zi = z[i];
            for (std::size_t k = i + 1; k < n_; ++k, ++t)
                wz_[t] = kernel_unnorm((zi - z[k]) * inv_h_, family_);
        }

        // univariate fit on Z alone: the (h*, infinity) side of the ratio
        std::vector<double> w_sum(n_, 1.0), wy_sum(y_.begin(), y_.end());
        t = 0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double yi = y_[i];
            for (std::size_t k = i + 1; k < n_; ++k, ++t) {
                const double w = wz_[t];
                w_sum[i] += w;
                w_sum[k] += w;
                wy_sum[i] += w * y_[k];
                wy_sum[k] += w * yi;
            }
        }
        rss_z_ = 0.0;
        trace_z_ = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double fit = wy_sum[i] / w_sum[i];
            const double r = y_[i] - fit;
            rss_z_ += r * r;
            trace_z_ += 1.0 / w_sum[i];
        }
    }

    double rss_z() const { return rss_z_; }
    double trace_z() const { return trace_z_; }

    ConditionalImportance score(std::span<const double> x, double unit) const {
        std::vector<double> w_sum(n_, 1.0), wy_sum(y_.begin(), y_.end());
        std::size_t t = 0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double xi = x[i], yi = y_[i];
            for (std::size_t k = i + 1; k < n_; ++k, ++t) {
                const double w = wz_[t] * kernel_unnorm((xi - x[k]) * inv_h_, family_);
                w_sum[i] += w;
                w_sum[k] += w;
                wy_sum[i] += w * y_[k];
                wy_sum[k] += w * yi;
            }
        }
        double rss = 0.0, trace = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double fit = wy_sum[i] / w_sum[i];
            const double r = y_[i] - fit;
            rss += r * r;
            trace += 1.0 / w_sum[i];
        }
        const double denom = (trace - trace_z_) * unit;
        if (denom <= 1e-12 * unit) return {0.0, true};
        if (rss <= 0.0 || rss_z_ <= 0.0)
            throw Error(ErrorCode::DegenerateFit, "bivariate fit interpolates");
        const double nn = static_cast<double>(n_);
        return {(std::log(rss_z_ / nn) - std::log(rss / nn)) / denom, false};
    }

private:
    std::size_t n_;
    double inv_h_;
    KernelFamily family_;
    std::vector<double> y_;
    std::vector<double> wz_;
    double rss_z_ = 0.0, trace_z_ = 0.0;
};

std::vector<std::size_t> map_selected(const MekroModel& model,
                                      const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> out;
    out.reserve(model.selected.size());
    for (std::size_t pos : model.selected) out.push_back(candidates[pos]);
    return out;
}

Matrix gather_columns(const Matrix& X, const std::vector<std::size_t>& cols) {
    Matrix out(X.rows(), cols.size());
    for (std::size_t a = 0; a < cols.size(); ++a) {
        auto src = X.col(cols[a]);
        auto dst = out.col(a);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

} // namespace

const char* to_string(StopReason reason) {
    switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::SizeCap: return "size_cap";
    case StopReason::IterationCap: return "iteration_cap";
    case StopReason::EmptyAddition: return "empty_addition";
    }
    return "unknown";
}

std::vector<double> surrogate(const MekroModel& model, SurrogateScale scale) {
    const auto& f = model.fitted;
    if (f.empty()) throw Error(ErrorCode::DegenerateSurrogate, "model has no fitted values");
    const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
    if (*hi_it == *lo_it)
        throw Error(ErrorCode::DegenerateSurrogate, "fitted values are constant");
    if (scale == SurrogateScale::Raw) return f;
    std::vector<double> z(f.size());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    for (std::size_t i = 0; i < f.size(); ++i) z[i] = (f[i] - lo) / range;
    return z;
}

ConditionalImportance conditional_importance(std::span<const double> z,
                                             std::span<const double> x_j,
                                             std::span<const double> y, double h_star,
                                             std::size_t p, const ScreeningConfig& cfg) {
    const std::size_t n = y.size();
    if (z.size() != n || x_j.size() != n)
        throw Error(ErrorCode::InvalidDimension, "z, x and y must have equal length");
    if (!(h_star > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_star must be > 0");
    detail::require_finite(z, "z");
    detail::require_finite(x_j, "x");
    detail::require_finite(y, "y");
    if (detail::total_sum_squares(y) <= 0.0)
        throw Error(ErrorCode::DegenerateResponse, "response is constant");

    const double L = detail::rate_log(n, p, cfg.rate);
    const double unit = std::sqrt(L / static_cast<double>(n)) * std::sqrt(h_star);
    CondScorer scorer(z, y, h_star, cfg.kernel.family);
    return scorer.score(x_j, unit);
}

IfbisTrace ifbis_run(const Dataset& data, const IfbisConfig& cfg) {
    const std::size_t n = data.n(), p = data.p();
    const std::size_t s0 =
        cfg.s0 > 0 ? cfg.s0
                   : std::max<std::size_t>(
                         1, static_cast<std::size_t>(static_cast<double>(n) /
                                                     std::log(static_cast<double>(n))));
    if (cfg.k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 1");

    IfbisTrace trace;
    const RescaleInfo info = compute_rescale(data.X);
    if (cfg.screening.rescale) {
        trace.rescale = info;
    } else {
        trace.rescale.mins.assign(p, 0.0);
        trace.rescale.ranges.assign(p, 1.0);
    }
    const Matrix Xs = trace.rescale.apply(data.X);

    trace.screening = fbis_screen(data, cfg.screening);
    trace.h_star = trace.screening.h_star;
    const double L = detail::rate_log(n, p, cfg.screening.rate);
    const double unit = std::sqrt(L / static_cast<double>(n)) * std::sqrt(trace.h_star);
    const KernelSpec kernel = cfg.screening.kernel;

    const std::vector<std::size_t> a1 = trace.screening.selected;
    if (a1.empty()) {
        trace.stop_reason = StopReason::Converged;
        return trace;
    }

    std::vector<std::size_t> mekro_cands(a1);
    std::sort(mekro_cands.begin(), mekro_cands.end());
    MekroPath path = mekro_bic_path(gather_columns(Xs, mekro_cands), data.y, cfg.mekro, kernel);
    std::vector<std::size_t> selected = map_selected(path.best, mekro_cands);

    trace.iterations.push_back(
        {a1, mekro_cands, path.best, selected, {}, false});
    trace.final_set = selected;
    if (selected.empty()) {
        trace.stop_reason = StopReason::Converged;
        return trace;
    }
    if (selected.size() >= s0) {
        trace.stop_reason = StopReason::SizeCap;
        return trace;
    }

    MekroModel prev_model = path.best;
    std::vector<std::size_t> prev_cands = mekro_cands;

    for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
        std::vector<std::size_t> rest;
        rest.reserve(p - selected.size());
        for (std::size_t j = 0; j < p; ++j)
            if (!std::binary_search(selected.begin(), selected.end(), j)) rest.push_back(j);

        std::vector<std::pair<std::size_t, double>> cond_scores;
        std::vector<double> scores(rest.size(), 0.0);
        std::vector<char> degenerate(rest.size(), 0);
        bool fallback = false;
        double threshold = 0.0;

        std::vector<double> z;
        try {
            z = surrogate(prev_model, cfg.surrogate_scale);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateSurrogate) throw;
            fallback = true;
        }

        if (!fallback) {
            CondScorer scorer(z, data.y, trace.h_star, kernel.family);
            parallel_for(rest.size(), [&](std::size_t begin, std::size_t end) {
                for (std::size_t a = begin; a < end; ++a) {
                    const auto s = scorer.score(Xs.col(rest[a]), unit);
                    scores[a] = s.degenerate ? 0.0 : s.value;
                    degenerate[a] = s.degenerate ? 1 : 0;
                }
            });
            if (cfg.rule == ConditionalRule::PermutationMax) {
                double best_null = -std::numeric_limits<double>::infinity();
                for (std::size_t r = 0; r < cfg.screening.n_permutations; ++r) {
                    Rng rng(sub_seed(sub_seed(cfg.screening.seed, seed_tag::conditional, iter),
                                     seed_tag::permutation, r));
                    const auto perm = random_permutation(n, rng);
                    std::vector<double> nulls(rest.size(), 0.0);
                    parallel_for(rest.size(), [&](std::size_t begin, std::size_t end) {
                        std::vector<double> xperm(n);
                        for (std::size_t a = begin; a < end; ++a) {
                            auto src = Xs.col(rest[a]);
                            for (std::size_t i = 0; i < n; ++i) xperm[i] = src[perm[i]];
                            const auto s = scorer.score(xperm, unit);
                            nulls[a] = s.degenerate ? 0.0 : s.value;
                        }
                    });
                    for (double v : nulls) best_null = std::max(best_null, v);
                }
                threshold = best_null;
            }
        } else {
            // degenerate surrogate: score the remaining columns unconditionally
            const double tss = detail::total_sum_squares(data.y);
            parallel_for(rest.size(), [&](std::size_t begin, std::size_t end) {
                for (std::size_t a = begin; a < end; ++a) {
                    const auto ds = detail::smooth_design_uni(Xs.col(rest[a]), data.y,
                                                              trace.h_star, kernel.family);
                    if (ds.rss <= 0.0)
                        throw Error(ErrorCode::DegenerateFit, "marginal fit interpolates");
                    const double nn = static_cast<double>(n);
                    scores[a] = (std::log(tss / nn) - std::log(ds.rss / nn)) /
                                (ds.trace * unit);
                }
            });
            if (cfg.rule == ConditionalRule::PermutationMax) {
                double best_null = -std::numeric_limits<double>::infinity();
                for (std::size_t r = 0; r < cfg.screening.n_permutations; ++r) {
                    Rng rng(sub_seed(sub_seed(cfg.screening.seed, seed_tag::conditional, iter),
                                     seed_tag::permutation, r));
                    const auto perm = random_permutation(n, rng);
                    std::vector<double> nulls(rest.size(), 0.0);
                    parallel_for(rest.size(), [&](std::size_t begin, std::size_t end) {
                        std::vector<double> xperm(n);
                        for (std::size_t a = begin; a < end; ++a) {
                            auto src = Xs.col(rest[a]);
                            for (std::size_t i = 0; i < n; ++i) xperm[i] = src[perm[i]];
                            const auto ds = detail::smooth_design_uni(xperm, data.y,
                                                                      trace.h_star,
                                                                      kernel.family);
                            const double nn = static_cast<double>(n);
                            nulls[a] = (std::log(tss / nn) - std::log(ds.rss / nn)) /
                                       (ds.trace * unit);
                        }
                    });
                    for (double v : nulls) best_null = std::max(best_null, v);
                }
                threshold = best_null;
            }
        }

        cond_scores.reserve(rest.size());
        for (std::size_t a = 0; a < rest.size(); ++a)
            cond_scores.emplace_back(rest[a], scores[a]);

        // rank candidates: score descending, index ascending
        std::vector<std::size_t> order(rest.size());
        for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return rest[a] < rest[b];
        });

        const std::size_t room = s0 > selected.size() ? s0 - selected.size() : 0;
        const std::size_t cap = std::min(cfg.k_max, room);
        std::vector<std::size_t> additions;
        for (std::size_t a : order) {
            if (additions.size() >= cap) break;
            if (degenerate[a]) continue;
            if (cfg.rule == ConditionalRule::PermutationMax) {
                if (scores[a] >= threshold) additions.push_back(rest[a]);
            } else {
                if (additions.size() < cfg.top_k && scores[a] > 0.0)
                    additions.push_back(rest[a]);
            }
        }

        if (additions.empty()) {
            trace.stop_reason = StopReason::EmptyAddition;
            trace.final_set = selected;
            return trace;
        }

        std::vector<std::size_t> cands(selected);
        cands.insert(cands.end(), additions.begin(), additions.end());
        std::sort(cands.begin(), cands.end());

        // previous solution seeds the fit; fresh columns start at 1/h*
        std::vector<double> warm(cands.size(), 1.0 / trace.h_star);
        for (std::size_t a = 0; a < cands.size(); ++a) {
            for (std::size_t b = 0; b < prev_cands.size(); ++b) {
                if (prev_cands[b] == cands[a] && prev_model.lambda[b] > cfg.mekro.lambda_min) {
                    warm[a] = prev_model.lambda[b];
                    break;
                }
            }
        }

        path = mekro_bic_path(gather_columns(Xs, cands), data.y, cfg.mekro, kernel, warm);
        std::vector<std::size_t> next = map_selected(path.best, cands);

        trace.iterations.push_back({additions, cands, path.best, next, cond_scores, fallback});
        prev_model = path.best;
        prev_cands = cands;
        trace.final_set = next;

        if (next.size() >= s0) {
            trace.stop_reason = StopReason::SizeCap;
            return trace;
        }
        if (next == selected) {
            trace.stop_reason = StopReason::Converged;
            return trace;
        }
        selected = std::move(next);
    }

    trace.stop_reason = StopReason::IterationCap;
    return trace;
}

std::vector<double> ifbis_predict(const IfbisTrace& trace, const Dataset& train,
                                  const Matrix& X_new, KernelSpec spec) {
    if (X_new.cols() != train.p())
        throw Error(ErrorCode::InvalidDimension, "X_new must have the training column count");
    const double ybar = detail::mean_of(train.y);
    if (trace.iterations.empty() || trace.final_set.empty())
        return std::vector<double>(X_new.rows(), ybar);

    const IfbisIteration& last = trace.iterations.back();
    const Matrix Xs_train = trace.rescale.apply(train.X);
    const Matrix Xs_new = trace.rescale.apply(X_new);
    Matrix train_a = gather_columns(Xs_train, last.mekro_candidates);
    Matrix new_a = gather_columns(Xs_new, last.mekro_candidates);
    return mekro_predict(last.model, train_a, train.y, new_a, spec);
}

} // namespace fbis
