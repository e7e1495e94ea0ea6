#pragma once

// Vector-input activations: softmax with its Jacobian, maxout with gradient
// routing, and the probability threshold decoder.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "actlib/error.hpp"
#include "actlib/matrix.hpp"
#include "actlib/numeric.hpp"

namespace actlib {

namespace detail {
inline void check_logits(std::span<const double> z) {
  if (z.empty()) throw ShapeMismatch("softmax: empty logit vector");
  if (!num::all_finite(z)) throw NonFiniteInput("softmax: logits must be finite");
}
}  // namespace detail

/// Max-shifted softmax.
inline std::vector<double> softmax(std::span<const double> z) {
  detail::check_logits(z);
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> a(z.size());
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += a[i] = std::exp(z[i] - m);
  for (double& v : a) v /= sum;
  return a;
}

/// J(i, j) = d a_j / d z_i = a_j (delta_ij - a_i).
inline Matrix softmax_jacobian(std::span<const double> z) {
  const auto a = softmax(z);
  const std::size_t n = a.size();
  Matrix J(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) J(i, j) = a[j] * ((i == j ? 1.0 : 0.0) - a[i]);
  return J;
}

/// k affine pieces over a shared input; w is k x d.
struct MaxoutUnit {
  Matrix w;
  std::vector<double> b;

  std::size_t pieces() const { return w.rows; }
  std::size_t dim() const { return w.cols; }
};

struct MaxoutResult {
  double value;
  std::size_t index;
};

inline MaxoutResult maxout(std::span<const double> x, const MaxoutUnit& u) {
  if (u.pieces() < 2) throw ShapeMismatch("maxout: at least 2 pieces required");
  if (u.b.size() != u.pieces()) throw ShapeMismatch("maxout: one bias per piece required");
  if (x.size() != u.dim())
    throw ShapeMismatch("maxout: input has " + std::to_string(x.size()) + " entries, pieces expect " +
                        std::to_string(u.dim()));
  MaxoutResult best{0, 0};
  for (std::size_t j = 0; j < u.pieces(); ++j) {
    double z = u.b[j];
    for (std::size_t i = 0; i < x.size(); ++i) z += u.w(j, i) * x[i];
    if (j == 0 || z > best.value) best = {z, j};  // ties keep the lowest index
  }
  return best;
}

struct MaxoutGrad {
  Matrix d_dw;
  std::vector<double> d_db;
  std::vector<double> d_dx;
  std::size_t winner;
};

/// Gradient of the maxout value: only the winning piece receives it.
inline MaxoutGrad maxout_grad(std::span<const double> x, const MaxoutUnit& u) {
  const auto r = maxout(x, u);
  MaxoutGrad g{Matrix(u.pieces(), u.dim()), std::vector<double>(u.pieces(), 0.0), std::vector<double>(u.dim()),
               r.index};
  g.d_db[r.index] = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.d_dw(r.index, i) = x[i];
    g.d_dx[i] = u.w(r.index, i);
  }
  return g;
}

/// 1 iff p > 0.5.
inline int threshold_decode(double p) { return p > 0.5 ? 1 : 0; }

}  // namespace actlib
