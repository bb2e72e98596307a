#include "fedmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedmf/error.hpp"

namespace fedmf {

namespace {

void require_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw InvalidArgument("Matrix: zero dimension (" + std::to_string(rows) + "x" +
                              std::to_string(cols) + ")");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    require_dims(rows, cols);
    data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_dims(rows, cols);
    if (data_.size() != rows * cols) {
        throw InvalidArgument("Matrix: data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); })) {
        throw InvalidArgument("Matrix: non-finite entry");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    require_dims(r, c);
    rows_ = r;
    cols_ = c;
    data_.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw InvalidArgument("Matrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    return diagonal(values.size(), values.size(), values);
}

Matrix Matrix::diagonal(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() > std::min(rows, cols)) {
        throw InvalidArgument("Matrix::diagonal: too many values for shape");
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

}  // namespace fedmf
