#include "fbis/mekro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbis/rng.hpp"
#include "fbis/smoothing.hpp"

namespace fbis {

namespace {

void validate_lambda(std::span<const double> lambda) {
    for (double l : lambda) {
        if (!std::isfinite(l)) throw Error(ErrorCode::NonFinite, "lambda contains NaN/Inf");
        if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
    }
}

// Packed upper-triangle evaluator: per-coordinate squared differences are
// precomputed once, every objective/gradient evaluation is then a handful of
// streaming passes plus one exp pass.
class PairEval {
public:
    PairEval(const Matrix& X, std::span<const double> y, KernelFamily family)
        : n_(X.rows()), d_(X.cols()), family_(family), y_(y.begin(), y.end()) {
        const std::size_t pairs = n_ * (n_ - 1) / 2;
        dsq_.resize(d_);
        for (std::size_t j = 0; j < d_; ++j) {
            dsq_[j].resize(pairs);
            auto col = X.col(j);
            std::size_t t = 0;
            for (std::size_t i = 0; i + 1 < n_; ++i) {
                const double xi = col[i];
                for (std::size_t k = i + 1; k < n_; ++k, ++t) {
                    const double dx = xi - col[k];
                    dsq_[j][t] = dx * dx;
                }
            }
        }
        acc_.resize(pairs);
        w_.resize(pairs);
        w_sum_.resize(n_);
        wy_sum_.resize(n_);
        fitted_.resize(n_);
        pair_term_.resize(pairs);
        const double ybar = detail::mean_of(y_);
        tss_ = 0.0;
        for (double v : y_) tss_ += (v - ybar) * (v - ybar);
    }

    std::size_t n() const { return n_; }
    std::size_t dim() const { return d_; }
    double tss() const { return tss_; }

    // RSS at lambda; leaves weights, row sums and fitted values cached.
    double objective(std::span<const double> lambda) {
        const std::size_t pairs = w_.size();
        if (family_ == KernelFamily::Gaussian) {
            std::fill(acc_.begin(), acc_.end(), 0.0);
            for (std::size_t j = 0; j < d_; ++j) {
                const double c = 0.5 * lambda[j] * lambda[j];
                if (c == 0.0) continue;
                const double* dsq = dsq_[j].data();
                double* acc = acc_.data();
                for (std::size_t t = 0; t < pairs; ++t) acc[t] += c * dsq[t];
            }
            for (std::size_t t = 0; t < pairs; ++t) w_[t] = std::exp(-acc_[t]);
        } else {
            std::fill(w_.begin(), w_.end(), 1.0);
            for (std::size_t j = 0; j < d_; ++j) {
                const double c = lambda[j] * lambda[j];
                if (c == 0.0) continue;
                const double* dsq = dsq_[j].data();
                for (std::size_t t = 0; t < pairs; ++t) {
                    const double f = 1.0 - c * dsq[t];
                    w_[t] *= f > 0.0 ? f : 0.0;
                }
            }
        }

        std::fill(w_sum_.begin(), w_sum_.end(), 1.0); // self weight
        for (std::size_t i = 0; i < n_; ++i) wy_sum_[i] = y_[i];
        std::size_t t = 0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double yi = y_[i];
            double wsi = 0.0, wyi = 0.0;
            for (std::size_t k = i + 1; k < n_; ++k, ++t) {
                const double w = w_[t];
                wsi += w;
                wyi += w * y_[k];
                w_sum_[k] += w;
                wy_sum_[k] += w * yi;
            }
            w_sum_[i] += wsi;
            wy_sum_[i] += wyi;
        }

        double rss = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            fitted_[i] = wy_sum_[i] / w_sum_[i];
            const double r = y_[i] - fitted_[i];
            rss += r * r;
        }
        return rss;
    }

    // Analytic gradient at the cached evaluation point (Gaussian only):
    //   dRSS/dl_j = 2 l_j sum_{i,k} Dsq_j(i,k) w_ik r_i (y_k - yhat_i),
    // with r_i = (y_i - yhat_i) / W_i; folded into one pass over pairs.
    void gradient_cached(std::span<const double> lambda, std::span<double> grad) {
        const std::size_t pairs = w_.size();
        std::size_t t = 0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double ri = (y_[i] - fitted_[i]) / w_sum_[i];
            const double fi = fitted_[i];
            for (std::size_t k = i + 1; k < n_; ++k, ++t) {
                const double rk = (y_[k] - fitted_[k]) / w_sum_[k];
                pair_term_[t] = w_[t] * (ri * (y_[k] - fi) + rk * (y_[i] - fitted_[k]));
            }
        }
        for (std::size_t j = 0; j < d_; ++j) {
            if (lambda[j] == 0.0) {
                grad[j] = 0.0; // RSS is even in each lambda_j around 0
                continue;
            }
            const double* dsq = dsq_[j].data();
            double dot = 0.0;
            for (std::size_t tt = 0; tt < pairs; ++tt) dot += pair_term_[tt] * dsq[tt];
            grad[j] = 2.0 * lambda[j] * dot;
        }
    }

    // Central finite differences (used for the non-smooth kernel family).
    void gradient_fd(std::span<const double> lambda, std::span<double> grad, double step) {
        std::vector<double> probe(lambda.begin(), lambda.end());
        for (std::size_t j = 0; j < d_; ++j) {
            const double keep = probe[j];
            probe[j] = keep + step;
            const double up = objective(probe);
            probe[j] = keep - step; // weights are even in lambda_j, negative probe is fine
            const double dn = objective(probe);
            probe[j] = keep;
            grad[j] = (up - dn) / (2.0 * step);
        }
    }

    double trace_cached() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += 1.0 / w_sum_[i];
        return t;
    }

    const std::vector<double>& fitted_cached() const { return fitted_; }

private:
    std::size_t n_, d_;
    KernelFamily family_;
    std::vector<double> y_;
    double tss_ = 0.0;
    std::vector<std::vector<double>> dsq_;
    std::vector<double> acc_, w_, w_sum_, wy_sum_, fitted_, pair_term_;
};

struct RunResult {
    std::vector<double> lambda;
    double objective = 0.0;
    bool converged = false;
};

RunResult descend(PairEval& pe, std::vector<double> lambda, double xi, const MekroConfig& cfg,
                  KernelFamily family) {
    const std::size_t d = pe.dim();
    lambda = project_feasible(std::move(lambda), xi);
    double obj = pe.objective(lambda);
    std::vector<double> grad(d), cand;
    RunResult out;

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        if (family == KernelFamily::Gaussian)
            pe.gradient_cached(lambda, grad);
        else
            pe.gradient_fd(lambda, grad, 1e-5);

        double alpha = cfg.ls_initial_step;
        bool accepted = false;
        double new_obj = obj;
        for (int halvings = 0; halvings < 60; ++halvings) {
            cand.assign(lambda.begin(), lambda.end());
            for (std::size_t j = 0; j < d; ++j) cand[j] -= alpha * grad[j];
            cand = project_feasible(std::move(cand), xi);
            double step_dot = 0.0;
            bool moved = false;
            for (std::size_t j = 0; j < d; ++j) {
                const double s = cand[j] - lambda[j];
                step_dot += grad[j] * s;
                moved = moved || s != 0.0;
            }
            if (!moved) break; // stationary under projection
            new_obj = pe.objective(cand);
            if (new_obj <= obj + cfg.ls_sufficient_decrease * step_dot) {
                accepted = true;
                break;
            }
            alpha *= cfg.ls_shrink;
        }
        if (!accepted) {
            out.converged = true; // no descent direction left
            break;
        }
        const double rel = (obj - new_obj) / std::max(std::fabs(obj), 1e-300);
        lambda.swap(cand);
        obj = new_obj; // cache now sits at the accepted iterate
        if (rel < cfg.rel_tolerance) {
            out.converged = true;
            break;
        }
    }
    out.lambda = std::move(lambda);
    out.objective = obj;
    return out;
}

std::vector<std::vector<double>> build_inits(PairEval& pe, double xi, const MekroConfig& cfg,
                                             std::span<const double> path_warm,
                                             std::span<const double> outer_warm) {
    const std::size_t d = pe.dim();
    std::vector<std::vector<double>> inits;

    if (cfg.restarts >= 1) inits.emplace_back(d, xi / (2.0 * static_cast<double>(d)));

    if (cfg.restarts >= 2 && d > 1) {
        // concentrated on the single variable whose lone fit is best
        std::size_t best_j = 0;
        double best_obj = 0.0;
        std::vector<double> probe(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            std::fill(probe.begin(), probe.end(), 0.0);
            probe[j] = 0.5 * xi;
            const double o = pe.objective(probe);
            if (j == 0 || o < best_obj) {
                best_obj = o;
                best_j = j;
            }
        }
        std::vector<double> conc(d, 0.0);
        conc[best_j] = 0.5 * xi;
        inits.push_back(std::move(conc));
    }

    if (cfg.restarts >= 3 && !path_warm.empty())
        inits.emplace_back(path_warm.begin(), path_warm.end());
    if (!outer_warm.empty()) inits.emplace_back(outer_warm.begin(), outer_warm.end());

    for (std::size_t r = 3; r < cfg.restarts; ++r) {
        Rng rng(sub_seed(cfg.seed, 0x4d454b52ULL, r)); // "MEKR"
        std::vector<double> rnd(d);
        double s = 0.0;
        for (auto& v : rnd) {
            v = rng.uniform01();
            s += v;
        }
        const double mass = xi * rng.uniform01();
        for (auto& v : rnd) v *= mass / s;
        inits.push_back(std::move(rnd));
    }

    // project and drop duplicates
    for (auto& init : inits) init = project_feasible(std::move(init), xi);
    std::vector<std::vector<double>> unique;
    for (auto& init : inits) {
        bool dup = false;
        for (const auto& u : unique) {
            double diff = 0.0;
            for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::fabs(u[j] - init[j]));
            if (diff < 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(init));
    }
    return unique;
}

MekroModel fit_with(PairEval& pe, double xi, const MekroConfig& cfg, KernelFamily family,
                    std::span<const double> path_warm, std::span<const double> outer_warm) {
    if (!(xi > 0.0)) throw Error(ErrorCode::InvalidArgument, "xi must be > 0");

    const auto inits = build_inits(pe, xi, cfg, path_warm, outer_warm);
    RunResult best;
    bool have = false;
    for (const auto& init : inits) {
        RunResult r = descend(pe, init, xi, cfg, family);
        if (!have || r.objective < best.objective) {
            best = std::move(r);
            have = true;
        }
    }

    MekroModel model;
    model.xi = xi;
    const std::size_t n = pe.n(), d = pe.dim();
    if (!have || best.objective > pe.tss()) {
        // the null fit (all bandwidths infinite) is always feasible
        model.lambda.assign(d, 0.0);
        model.objective = pe.tss();
        model.converged = true;
        (void)pe.objective(model.lambda);
        model.fitted = pe.fitted_cached();
        model.trace = 1.0;
    } else {
        model.lambda = best.lambda;
        model.converged = best.converged;
        model.objective = pe.objective(model.lambda); // refresh cache at the optimum
        model.fitted = pe.fitted_cached();
        model.trace = pe.trace_cached();
    }
    model.bic = mekro_bic(n, model.objective, model.trace);
    for (std::size_t j = 0; j < d; ++j)
        if (model.lambda[j] > cfg.lambda_min) model.selected.push_back(j);
    return model;
}

std::vector<double> auto_grid(std::size_t d) {
    const double lo = 0.5 * static_cast<double>(d);
    const double hi = 8.0 * static_cast<double>(d);
    const std::size_t count = 16;
    std::vector<double> grid(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    return grid;
}

} // namespace

double mekro_objective(std::span<const double> lambda, const Matrix& X_A,
                       std::span<const double> y, KernelSpec spec) {
    if (X_A.cols() != lambda.size())
        throw Error(ErrorCode::InvalidDimension, "lambda length must match columns");
    if (X_A.rows() != y.size()) throw Error(ErrorCode::InvalidDimension, "X/y size mismatch");
    validate_lambda(lambda);
    detail::require_finite(y, "y");
    detail::require_finite(X_A.data(), "X");
    std::vector<std::size_t> cols(X_A.cols());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    return detail::smooth_design_product(X_A, cols, lambda, y, spec.family).rss;
}

std::vector<double> mekro_gradient(std::span<const double> lambda, const Matrix& X_A,
                                   std::span<const double> y, KernelSpec spec) {
    if (spec.family != KernelFamily::Gaussian)
        throw Error(ErrorCode::Unsupported, "analytic gradient requires the Gaussian kernel");
    if (X_A.cols() != lambda.size())
        throw Error(ErrorCode::InvalidDimension, "lambda length must match columns");
    validate_lambda(lambda);
    detail::require_finite(y, "y");
    detail::require_finite(X_A.data(), "X");
    PairEval pe(X_A, y, spec.family);
    (void)pe.objective(lambda);
    std::vector<double> grad(lambda.size());
    pe.gradient_cached(lambda, grad);
    return grad;
}

std::vector<double> project_feasible(std::vector<double> lambda, double xi) {
    if (!(xi > 0.0)) throw Error(ErrorCode::InvalidArgument, "xi must be > 0");
    double clamped_sum = 0.0;
    for (double& l : lambda) {
        if (!std::isfinite(l)) throw Error(ErrorCode::NonFinite, "lambda contains NaN/Inf");
        if (l < 0.0) l = 0.0;
        clamped_sum += l;
    }
    if (clamped_sum <= xi) return lambda;

    // sorted-threshold projection onto the face sum = xi
    std::vector<double> u(lambda);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        css += u[k];
        const double cand = (css - xi) / static_cast<double>(k + 1);
        if (u[k] - cand > 0.0)
            theta = cand;
        else
            break;
    }
    for (double& l : lambda) l = std::max(l - theta, 0.0);
    return lambda;
}

double mekro_bic(std::size_t n, double objective, double trace) {
    const double nn = static_cast<double>(n);
    return nn * std::log(std::max(objective, 1e-300) / nn) + std::log(nn) * trace;
}

MekroModel mekro_fit(const Matrix& X_A, std::span<const double> y, double xi,
                     const MekroConfig& cfg, KernelSpec spec,
                     std::span<const double> warm_start) {
    if (X_A.cols() < 1) throw Error(ErrorCode::InvalidDimension, "mekro_fit requires d >= 1");
    if (X_A.rows() < 3) throw Error(ErrorCode::InvalidDimension, "mekro_fit requires n >= 3");
    if (X_A.rows() != y.size()) throw Error(ErrorCode::InvalidDimension, "X/y size mismatch");
    detail::require_finite(y, "y");
    detail::require_finite(X_A.data(), "X");
    PairEval pe(X_A, y, spec.family);
    return fit_with(pe, xi, cfg, spec.family, {}, warm_start);
}

MekroPath mekro_bic_path(const Matrix& X_A, std::span<const double> y, const MekroConfig& cfg,
                         KernelSpec spec, std::span<const double> warm_start) {
    if (X_A.cols() < 1) throw Error(ErrorCode::InvalidDimension, "mekro path requires d >= 1");
    if (X_A.rows() < 3) throw Error(ErrorCode::InvalidDimension, "mekro path requires n >= 3");
    if (X_A.rows() != y.size()) throw Error(ErrorCode::InvalidDimension, "X/y size mismatch");
    detail::require_finite(y, "y");
    detail::require_finite(X_A.data(), "X");

    std::vector<double> grid = cfg.xi_grid.empty() ? auto_grid(X_A.cols()) : cfg.xi_grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "xi grid must be positive");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw Error(ErrorCode::InvalidArgument, "xi grid must be strictly ascending");
    }

    PairEval pe(X_A, y, spec.family);
    MekroPath out;
    std::vector<double> path_warm;
    std::size_t best_idx = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        MekroModel m = fit_with(pe, grid[g], cfg, spec.family, path_warm, warm_start);
        path_warm = m.lambda;
        out.path.push_back(std::move(m));
        if (out.path[g].bic < out.path[best_idx].bic) best_idx = g;
    }
    out.best = out.path[best_idx];
    return out;
}

std::vector<double> mekro_predict(const MekroModel& model, const Matrix& X_train_A,
                                  std::span<const double> y_train, const Matrix& X_new_A,
                                  KernelSpec spec) {
    const std::size_t d = X_train_A.cols();
    if (model.lambda.size() != d || X_new_A.cols() != d)
        throw Error(ErrorCode::InvalidDimension, "column mismatch in mekro_predict");
    std::vector<Bandwidth> h;
    h.reserve(d);
    for (double l : model.lambda)
        h.push_back(l > 0.0 ? Bandwidth::finite(1.0 / l) : Bandwidth::infinite());
    return nw_fit_product(X_train_A, y_train, h, spec, X_new_A);
}

} // namespace fbis
