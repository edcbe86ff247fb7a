#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fbis/dataset.hpp"
#include "fbis/kernel.hpp"

namespace fbis {

// Whether rate quantities (h*, IC/IM penalties) use log p (the
// ultrahigh-dimensional regime) or log n (classical n >> p).
enum class RateDimension { UseP, UseLogN };

namespace seed_tag {
inline constexpr std::uint64_t permutation = 1;
inline constexpr std::uint64_t conditional = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t rows = 4;
inline constexpr std::uint64_t test_draw = 5;
} // namespace seed_tag

struct ScreeningConfig {
    double tau = 1.0;                 // IC penalty factor (hard rule only)
    std::optional<double> q = {};     // permutation quantile; nullopt = max
    std::size_t n_permutations = 1;
    std::uint64_t seed = 0;
    RateDimension rate = RateDimension::UseP;
    KernelSpec kernel = {};
    bool rescale = true;              // min-max predictors to [0,1] first

    bool operator==(const ScreeningConfig&) const = default;
};

struct VariableScore {
    double ic_hstar = 0.0;
    double im = 0.0;
    bool favored_hstar = false; // ic_hstar < ic_inf
    bool constant = false;      // zero-range column, IM forced to 0

    bool operator==(const VariableScore&) const = default;
};

struct ScreeningReport {
    double h_star = 0.0;
    double ic_inf = 0.0;
    std::vector<VariableScore> variables;
    double omega_q = 0.0;
    std::vector<std::size_t> selected;        // im >= omega, by im descending
    std::vector<double> permutation_ims;      // p * n_permutations values
    std::vector<std::size_t> ranking;         // all variables by im descending

    std::vector<std::size_t> top_k(std::size_t k) const;

    bool operator==(const ScreeningReport&) const = default;
};

// (log p / n)^(1/5) or (log n / n)^(1/5)
double h_star(std::size_t n, std::size_t p, RateDimension rate);

// log of the mean squared deviation about the mean
double ic_infinity(std::span<const double> y);

// Penalized log-RSS criterion at bandwidth h for one predictor.
double ic(std::span<const double> x_j, std::span<const double> y, Bandwidth h,
          const ScreeningConfig& cfg, std::size_t p);

// Degrees-of-freedom-normalized log-RSS drop; the tau-free importance score.
double importance_measure(std::span<const double> x_j, std::span<const double> y, double h_star,
                          std::size_t p, const ScreeningConfig& cfg);

// Hard rule: variables whose IC at h* beats IC at infinity.
std::vector<std::size_t> fbis_hard_select(const Dataset& data, const ScreeningConfig& cfg);

// Null IMs from permutation-decoupled data and their q-quantile (or max).
std::pair<double, std::vector<double>> permutation_threshold(const Dataset& data,
                                                             const ScreeningConfig& cfg);

ScreeningReport fbis_screen(const Dataset& data, const ScreeningConfig& cfg);

// IM ranking only (no permutation pass); cheap path for top-k evaluations.
std::vector<std::size_t> fbis_rank(const Dataset& data, const ScreeningConfig& cfg,
                                   std::vector<double>* ims_out = nullptr);

// Baseline: rank by |Pearson correlation| descending, ties by index.
std::vector<std::size_t> sis_rank(const Dataset& data);

namespace detail {
double rate_log(std::size_t n, std::size_t p, RateDimension rate);
double total_sum_squares(std::span<const double> y);
std::vector<std::size_t> order_by_score_desc(const std::vector<double>& score);
double lower_quantile(std::vector<double> values, std::optional<double> q);
} // namespace detail

} // namespace fbis
