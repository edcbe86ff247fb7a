#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fbis/datagen.hpp"
#include "fbis/ifbis.hpp"

namespace fbis {

enum class BenchMethod { FBIS, SIS };

struct SelectionCounts {
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t captured = 0;

    bool operator==(const SelectionCounts&) const = default;
};

SelectionCounts evaluate_selection(const std::vector<std::size_t>& selected,
                                   const std::vector<std::size_t>& truth, std::size_t p);

// Mean squared prediction error of `predict` over the test rows.
double mspe(const std::function<std::vector<double>(const Matrix&)>& predict,
            const Dataset& test);

struct BenchCell {
    int example = 0;
    double rho = 0.0;
    double sigma2 = 0.0;
    std::string method;
    std::string metric;
    double mean = 0.0;
    double se = 0.0;            // sample sd / sqrt(reps); 0 by convention when reps == 1
    bool se_degenerate = false; // flags the single-replicate convention
    std::vector<double> values;

    bool operator==(const BenchCell&) const = default;
};

struct BenchResult {
    std::vector<BenchCell> cells;
    std::size_t replicates = 0;
    std::string fingerprint; // hash of settings + seeds

    bool operator==(const BenchResult&) const = default;
};

// Top-k selection accuracy per method over the grid; per-replicate seeds are
// seed_base + replicate for auditability.
BenchResult run_table1(const std::set<BenchMethod>& methods, const std::vector<SimSpec>& grid,
                       std::size_t reps, std::size_t top_k, std::uint64_t seed_base,
                       const ScreeningConfig& screening = {});

// FP/FN/MSPE of the iterative procedure; fresh test draw (noise included) per
// replicate.
BenchResult run_table2(const std::vector<SimSpec>& grid, std::size_t reps, std::size_t test_n,
                       std::uint64_t seed_base, const IfbisConfig& cfg = {});

std::string to_string(BenchMethod method);

} // namespace fbis
