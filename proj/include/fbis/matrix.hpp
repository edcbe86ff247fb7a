#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbis/errors.hpp"

namespace fbis {

// Dense column-major matrix. Columns are the natural unit of access here:
// every screening/smoothing routine walks one predictor column at a time.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_columns(std::size_t rows, const std::vector<std::vector<double>>& columns) {
        Matrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows)
                throw Error(ErrorCode::InvalidDimension, "column length mismatch");
            std::copy(columns[j].begin(), columns[j].end(), m.col_begin(j));
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
    std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
    double* col_begin(std::size_t j) { return data_.data() + j * rows_; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace fbis
