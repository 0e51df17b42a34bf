#pragma once

#include "saepipe/errors.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace saepipe {

// Dense row-major matrix of doubles. Just storage with bounds-checked
// construction; the numeric modules do their own loops.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

// Keeps the named columns (in the order given) and drops the rest.
inline Matrix project_columns(const Matrix& x, std::span<const std::uint32_t> columns) {
    for (std::uint32_t c : columns)
        if (c >= x.cols)
            throw shape_error("column index " + std::to_string(c) + " out of range (matrix has " +
                              std::to_string(x.cols) + " columns)");
    Matrix out(x.rows, columns.size());
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t j = 0; j < columns.size(); ++j)
            out(r, j) = x(r, columns[j]);
    return out;
}

} // namespace saepipe
