#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fbis/dataset.hpp"
#include "fbis/mekro.hpp"
#include "fbis/screening.hpp"

namespace fbis {

// Scale applied to the surrogate Z = fitted values before it enters the
// bivariate conditional smoothers. Raw keeps the response scale, which keeps
// h* sharp relative to Z's spread; MinMax maps onto [0,1].
enum class SurrogateScale { Raw, MinMax };

enum class ConditionalRule { PermutationMax, TopK };

enum class StopReason { Converged, SizeCap, IterationCap, EmptyAddition };

struct IfbisConfig {
    ScreeningConfig screening;
    MekroConfig mekro;
    std::size_t s0 = 0;             // max model size; 0 = floor(n / log n)
    std::size_t k_max = 10;         // additions per iteration
    std::size_t max_iterations = 10;
    ConditionalRule rule = ConditionalRule::PermutationMax;
    std::size_t top_k = 5;          // used by the TopK rule
    SurrogateScale surrogate_scale = SurrogateScale::Raw;

    bool operator==(const IfbisConfig&) const = default;
};

struct ConditionalImportance {
    double value = 0.0;
    bool degenerate = false; // X_j added no effective degrees of freedom

    bool operator==(const ConditionalImportance&) const = default;
};

struct IfbisIteration {
    std::vector<std::size_t> candidate_set;    // additions proposed this round (A_l)
    std::vector<std::size_t> mekro_candidates; // columns the model was fit on
    MekroModel model;
    std::vector<std::size_t> selected_set;     // M_l
    std::vector<std::pair<std::size_t, double>> conditional_ims; // empty on the first round
    bool surrogate_fallback = false; // degenerate Z, scored unconditionally

    bool operator==(const IfbisIteration&) const = default;
};

struct IfbisTrace {
    std::vector<IfbisIteration> iterations;
    std::vector<std::size_t> final_set;
    StopReason stop_reason = StopReason::Converged;
    double h_star = 0.0;
    RescaleInfo rescale;       // predictor transform used throughout the run
    ScreeningReport screening; // step-1 report

    bool operator==(const IfbisTrace&) const = default;
};

// Surrogate predictor from a MEKRO fit. Throws DegenerateSurrogate when the
// fitted values are constant.
std::vector<double> surrogate(const MekroModel& model, SurrogateScale scale = SurrogateScale::Raw);

// Conditional importance of x_j given the surrogate z: log-RSS drop between
// the (h*, infinity) and (h*, h*) bivariate fits over the added degrees of
// freedom. A denominator below 1e-12 flags the score as degenerate (value 0).
ConditionalImportance conditional_importance(std::span<const double> z,
                                             std::span<const double> x_j,
                                             std::span<const double> y, double h_star,
                                             std::size_t p, const ScreeningConfig& cfg);

IfbisTrace ifbis_run(const Dataset& data, const IfbisConfig& cfg);

// Prediction at new rows with the final model, smoothing over the training
// sample. Falls back to the training mean when the final set is empty.
std::vector<double> ifbis_predict(const IfbisTrace& trace, const Dataset& train,
                                  const Matrix& X_new, KernelSpec spec);

const char* to_string(StopReason reason);

} // namespace fbis
