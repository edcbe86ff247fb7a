#include "fbis/dataset.hpp"

#include <cmath>

#include "fbis/smoothing.hpp"

namespace fbis {

Dataset::Dataset(std::vector<double> y_in, Matrix X_in, std::vector<std::string> names_in,
                 std::vector<std::size_t> truth_in)
    : y(std::move(y_in)), X(std::move(X_in)), names(std::move(names_in)),
      truth(std::move(truth_in)) {
    if (y.size() < 2) throw Error(ErrorCode::TooFewRows, "dataset needs n >= 2 rows");
    if (X.rows() != y.size())
        throw Error(ErrorCode::InvalidDimension, "X row count does not match y");
    if (X.cols() < 1) throw Error(ErrorCode::InvalidDimension, "dataset needs p >= 1 predictors");
    detail::require_finite(y, "y");
    detail::require_finite(X.data(), "X");
    if (!names.empty() && names.size() != X.cols())
        throw Error(ErrorCode::InvalidDimension, "names length does not match p");
    for (std::size_t j : truth)
        if (j >= X.cols()) throw Error(ErrorCode::IndexOutOfRange, "truth index out of range");

    const double first = y.front();
    bool varies = false;
    for (double v : y)
        if (v != first) {
            varies = true;
            break;
        }
    if (!varies) throw Error(ErrorCode::DegenerateResponse, "response is constant");
}

RescaleInfo compute_rescale(const Matrix& X) {
    RescaleInfo info;
    info.mins.resize(X.cols());
    info.ranges.resize(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        auto c = X.col(j);
        double lo = c[0], hi = c[0];
        for (double v : c) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        info.mins[j] = lo;
        info.ranges[j] = hi - lo;
    }
    return info;
}

Matrix RescaleInfo::apply(const Matrix& X) const {
    Matrix out(X.rows(), X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const double lo = mins[j];
        const double scale = ranges[j] == 0.0 ? 0.0 : 1.0 / ranges[j];
        auto src = X.col(j);
        auto dst = out.col(j);
        for (std::size_t i = 0; i < X.rows(); ++i) dst[i] = (src[i] - lo) * scale;
    }
    return out;
}

} // namespace fbis
