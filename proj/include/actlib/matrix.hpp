#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "actlib/error.hpp"

namespace actlib {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  std::size_t size() const { return data.size(); }
};

inline void require_shape(const Matrix& m, std::size_t r, std::size_t c, const char* what) {
  if (m.rows != r || m.cols != c)
    throw ShapeMismatch(std::string(what) + ": expected " + std::to_string(r) + "x" + std::to_string(c) + ", got " +
                        std::to_string(m.rows) + "x" + std::to_string(m.cols));
}

}  // namespace actlib
