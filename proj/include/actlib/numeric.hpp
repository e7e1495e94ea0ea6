#pragma once

// Scalar helpers shared by the activation catalog and the test oracles.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace actlib::num {

inline constexpr double ln2 = std::numbers::ln2;
inline constexpr double e = std::numbers::e;

/// 1 / (1 + e^-x) without overflow for large |x|.
inline double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) noexcept {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double gaussian_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF via erfc, accurate to a few ulps in both tails.
inline double gaussian_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double sech(double x) noexcept { return 1.0 / std::cosh(x); }

inline double tanh_d1(double x) noexcept {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

inline double tanh_d2(double x) noexcept {
  const double t = std::tanh(x);
  return -2.0 * t * (1.0 - t * t);
}

/// Low-discrepancy points in [lo, hi): additive recurrence on the golden ratio.
/// Deterministic and RNG-free so gradient sweeps are reproducible.
inline double kronecker_point(std::size_t i, double lo, double hi) noexcept {
  constexpr double phi_frac = 0.6180339887498948482;
  double u = 0.5 + phi_frac * static_cast<double>(i + 1);
  u -= std::floor(u);
  return lo + (hi - lo) * u;
}

inline bool all_finite(std::span<const double> v) noexcept {
  for (double d : v)
    if (!std::isfinite(d)) return false;
  return true;
}

}  // namespace actlib::num
