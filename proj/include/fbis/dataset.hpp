#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbis/matrix.hpp"

namespace fbis {

// Response vector plus n x p predictor matrix. `truth` optionally carries the
// ground-truth signal set (0-based) for benchmarking. Variable indices are
// 0-based in memory; serialized reports use 1-based indices.
struct Dataset {
    std::vector<double> y;
    Matrix X;
    std::vector<std::string> names; // empty or one label per predictor
    std::vector<std::size_t> truth; // empty when unknown

    Dataset() = default;
    Dataset(std::vector<double> y_in, Matrix X_in, std::vector<std::string> names_in = {},
            std::vector<std::size_t> truth_in = {});

    std::size_t n() const noexcept { return y.size(); }
    std::size_t p() const noexcept { return X.cols(); }
};

// Per-column min-max rescale to [0,1]. Columns with zero range are flagged
// (range stored as 0) and map to 0.
struct RescaleInfo {
    std::vector<double> mins;
    std::vector<double> ranges;

    bool constant(std::size_t j) const { return ranges[j] == 0.0; }
    Matrix apply(const Matrix& X) const;

    bool operator==(const RescaleInfo&) const = default;
};

RescaleInfo compute_rescale(const Matrix& X);

} // namespace fbis
