#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbis/kernel.hpp"
#include "fbis/matrix.hpp"

namespace fbis {

struct MekroConfig {
    std::vector<double> xi_grid;        // empty = 16 log-spaced points in [0.5 d, 8 d]
    std::size_t max_iterations = 500;
    double rel_tolerance = 1e-8;        // relative objective decrease
    double ls_initial_step = 1.0;       // backtracking line search
    double ls_shrink = 0.5;
    double ls_sufficient_decrease = 1e-4;
    std::size_t restarts = 3;           // uniform, concentrated, warm; beyond 3 adds random
    double lambda_min = 1e-6;           // support threshold for "selected"
    std::uint64_t seed = 0;             // seeds extra random restarts only

    bool operator==(const MekroConfig&) const = default;
};

struct MekroModel {
    std::vector<double> lambda;          // per-candidate inverse bandwidths, >= 0
    double xi = 0.0;
    double objective = 0.0;              // RSS at the optimum
    std::vector<double> fitted;
    double trace = 0.0;                  // product-smoother trace at lambda
    double bic = 0.0;
    std::vector<std::size_t> selected;   // positions with lambda > lambda_min (0-based)
    bool converged = true;

    bool operator==(const MekroModel&) const = default;
};

struct MekroPath {
    MekroModel best;
    std::vector<MekroModel> path;
};

// RSS of the product-kernel NW fit at the design points (lambda_j = 0 drops
// coordinate j, budget not checked here).
double mekro_objective(std::span<const double> lambda, const Matrix& X_A,
                       std::span<const double> y, KernelSpec spec);

// Analytic dRSS/dlambda; Gaussian only (Epanechnikov falls back to finite
// differences inside mekro_fit).
std::vector<double> mekro_gradient(std::span<const double> lambda, const Matrix& X_A,
                                   std::span<const double> y, KernelSpec spec);

// Euclidean projection onto {lambda >= 0, sum lambda <= xi}.
std::vector<double> project_feasible(std::vector<double> lambda, double xi);

double mekro_bic(std::size_t n, double objective, double trace);

MekroModel mekro_fit(const Matrix& X_A, std::span<const double> y, double xi,
                     const MekroConfig& cfg, KernelSpec spec,
                     std::span<const double> warm_start = {});

// Fits the whole xi grid with warm starts along the path; best = argmin BIC,
// ties to the smaller xi. `warm_start` seeds every grid point in addition to
// the standard restarts (used by the iterative loop to keep an established
// support alive).
MekroPath mekro_bic_path(const Matrix& X_A, std::span<const double> y, const MekroConfig& cfg,
                         KernelSpec spec, std::span<const double> warm_start = {});

// Product-kernel NW prediction at new points with the model's bandwidths,
// smoothing over the training sample. Rows with underflowed weight sums fall
// back to the training mean.
std::vector<double> mekro_predict(const MekroModel& model, const Matrix& X_train_A,
                                  std::span<const double> y_train, const Matrix& X_new_A,
                                  KernelSpec spec);

} // namespace fbis
