#pragma once

#include <cstddef>
#include <vector>

#include "qcm/errors.hpp"

namespace qcm {

/// Dense row-major matrix of doubles. Small helper shared by chevron maps,
/// sweep grids and fit covariances.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool empty() const { return rows == 0 || cols == 0; }
};

} // namespace qcm
