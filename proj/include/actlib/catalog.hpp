#pragma once

// Scalar evaluation of every catalog kind, together with the analytic input
// and parameter derivatives, breakpoints and static descriptors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "actlib/error.hpp"
#include "actlib/kinds.hpp"
#include "actlib/numeric.hpp"
#include "actlib/stochastic.hpp"

namespace actlib {

namespace detail {

struct Pt {
  double v;
  double d;
};

inline double hard_sig_half(double x) { return std::max(0.0, std::min(1.0, 0.5 * (x + 1.0))); }

/// Value and d/dx at x. When dp is non-null it must hold n zeros; the
/// partials with respect to learnable parameters are written into it.
/// Sampled coefficients are read from p as given.
inline Pt core(Kind k, const double* p, std::size_t n, double x, double* dp) {
  using num::logistic;
  switch (k) {
    case Kind::logistic: {
      const double s = logistic(x);
      return {s, s * (1 - s)};
    }
    case Kind::tanh: {
      const double t = std::tanh(x);
      return {t, 1 - t * t};
    }
    case Kind::stanh: {
      const double t = std::tanh(p[1] * x);
      return {p[0] * t, p[0] * p[1] * (1 - t * t)};
    }
    case Kind::psf: {
      // sigma^m evaluated in log space so large m cannot overflow
      const double v = std::exp(-p[0] * num::softplus(-x));
      return {v, p[0] * v * (1 - logistic(x))};
    }
    case Kind::resech: {
      const double s = num::sech(x);
      return {x * s, s * (1 - x * std::tanh(x))};
    }
    case Kind::ssigmoid: {
      const double s = logistic(x);
      return {4 * s - 2, 4 * s * (1 - s)};
    }
    case Kind::ptanh: {
      const double t = std::tanh(x);
      if (x > 0) return {t, 1 - t * t};
      return {p[0] * t, p[0] * (1 - t * t)};
    }
    case Kind::hexpo: {
      if (x >= 0) return {-p[0] * std::expm1(-x / p[1]), p[0] / p[1] * std::exp(-x / p[1])};
      return {p[2] * std::expm1(x / p[3]), p[2] / p[3] * std::exp(x / p[3])};
    }
    case Kind::silu: {
      const double s = logistic(x);
      return {x * s, s * (1 + x * (1 - s))};
    }
    case Kind::dsilu: {
      const double s = logistic(x);
      const double g = s * (1 - s);
      return {s * (1 + x * (1 - s)), g * (2 + x * (1 - 2 * s))};
    }
    case Kind::lisht: {
      const double t = std::tanh(x);
      return {x * t, t + x * (1 - t * t)};
    }
    case Kind::elliott:
    case Kind::softsign: {
      const double q = 1 + std::abs(x);
      return {x / q, 1 / (q * q)};
    }
    case Kind::elliott_unit: {
      const double q = 1 + std::abs(x);
      return {0.5 * x / q + 0.5, 0.5 / (q * q)};
    }
    case Kind::melliott: {
      const double q = 1 + x * x;
      return {x / std::sqrt(q), 1 / (q * std::sqrt(q))};
    }
    case Kind::srs: {
      const double a = p[0], b = p[1];
      const double e = std::exp(-x / b);
      const double D = x / a + e;
      if (dp) {
        dp[0] = x * x / (a * a * D * D);
        dp[1] = -x * x * e / (b * b * D * D);
      }
      return {x / D, (1 + x / b) * e / (D * D)};
    }
    case Kind::hard_sigmoid:
      if (x < -2.5) return {0, 0};
      if (x > 2.5) return {1, 0};
      return {0.2 * x + 0.5, 0.2};
    case Kind::hard_tanh:
      if (x < -1) return {-1, 0};
      if (x > 1) return {1, 0};
      return {x, 1};
    case Kind::relu:
      return x >= 0 ? Pt{x, 1} : Pt{0, 0};
    case Kind::leaky_relu:
      return x >= 0 ? Pt{x, 1} : Pt{p[0] * x, p[0]};
    case Kind::prelu:
      if (x >= 0) return {x, 1};
      if (dp) dp[0] = x;
      return {p[0] * x, p[0]};
    case Kind::rrelu:
      return x >= 0 ? Pt{x, 1} : Pt{p[2] * x, p[2]};
    case Kind::ptelu: {
      if (x > 0) return {x, 1};
      const double t = std::tanh(p[1] * x);
      if (dp) {
        dp[0] = t;
        dp[1] = p[0] * x * (1 - t * t);
      }
      return {p[0] * t, p[0] * p[1] * (1 - t * t)};
    }
    case Kind::frelu:
      if (dp) dp[0] = 1;
      return x > 0 ? Pt{x + p[0], 1} : Pt{p[0], 0};
    case Kind::rt_relu: {
      const double y = x + p[1];
      return y > 0 ? Pt{y, 1} : Pt{0, 0};
    }
    case Kind::rt_prelu: {
      const double y = x + p[2];
      if (y > 0) return {y, 1};
      if (dp) dp[1] = y;
      return {p[1] * y, p[1]};
    }
    case Kind::shifted_relu:
      return x >= -1 ? Pt{x, 1} : Pt{-1, 0};
    case Kind::drelu:
      return x >= -p[0] ? Pt{x, 1} : Pt{-p[0], 0};
    case Kind::vrelu:
      return x >= 0 ? Pt{x, 1} : Pt{-x, -1};
    case Kind::sign_relu: {
      if (x >= 0) return {x, 1};
      const double q = 1 + std::abs(x);
      return {p[0] * x / q, p[0] / (q * q)};
    }
    case Kind::blu: {
      const double r = std::sqrt(x * x + 1);
      if (dp) dp[0] = r - 1;
      return {p[0] * (r - 1) + x, p[0] * x / r + 1};
    }
    case Kind::s_shaped_relu: {
      const double r = p[0], a = p[1], l = p[2], b = p[3];
      if (x >= r) {
        if (dp) {
          dp[0] = 1 - a;
          dp[1] = x - r;
        }
        return {r + a * (x - r), a};
      }
      if (x > l) return {x, 1};
      if (dp) {
        dp[2] = 1 - b;
        dp[3] = x - l;
      }
      return {l + b * (x - l), b};
    }
    case Kind::erelu:
      return x > 0 ? Pt{p[1] * x, p[1]} : Pt{0, 0};
    case Kind::eprelu:
      if (x > 0) return {p[2] * x, p[2]};
      if (dp) dp[1] = x;
      return {p[1] * x, p[1]};
    case Kind::lisa:
    case Kind::alisa: {
      const bool learn = k == Kind::alisa && dp;
      if (x > 1) {
        if (learn) dp[0] = x - 1;
        return {p[0] * x - p[0] + 1, p[0]};
      }
      if (x >= 0) return {x, 1};
      if (learn) dp[1] = x;
      return {p[1] * x, p[1]};
    }
    case Kind::brelu:
      if (x <= 0) return {0, 0};
      if (x <= p[0]) return {x, 1};
      return {p[0], 0};
    case Kind::blrelu:
      if (x <= 0) return {0.01 * x, 0.01};
      if (x <= p[0]) return {x, 1};
      return {0.01 * x + 0.99 * p[0], 0.01};
    case Kind::bif: {
      const double a = p[0];
      if (x < -a) return {-x - a / 2, -1};
      if (x > a) return {x - a / 2, 1};
      return {x * x / (2 * a), x / a};
    }
    case Kind::bbif: {
      const double a = p[0], b = p[1];
      if (x < -b - a / 2) return {b, 0};
      if (x < -a) return {-x - a / 2, -1};
      if (x <= a) return {x * x / (2 * a), x / a};
      if (x <= b + a / 2) return {x - a / 2, 1};
      return {b, 0};
    }
    case Kind::reltanh: {
      const double lp = p[0], ln = p[1];
      if (x >= lp) {
        const double s = num::tanh_d1(lp);
        if (dp) dp[0] = num::tanh_d2(lp) * (x - lp);
        return {s * (x - lp) + std::tanh(lp), s};
      }
      if (x > ln) {
        const double t = std::tanh(x);
        return {t, 1 - t * t};
      }
      const double s = num::tanh_d1(ln);
      if (dp) dp[1] = num::tanh_d2(ln) * (x - ln);
      return {s * (x - ln) + std::tanh(ln), s};
    }
    case Kind::plu: {
      const double a = p[0], c = p[1];
      Pt inner = {x, 1};
      const double up = a * (x - c) + c;
      if (up < x) inner = {up, a};
      const double lo = a * (x + c) - c;
      if (lo > inner.v) return {lo, a};
      return inner;
    }
    case Kind::nlrelu:
      if (x < 0) return {0, 0};
      return {std::log1p(p[0] * x), p[0] / (p[0] * x + 1)};
    case Kind::mtlu: {
      const std::size_t K = mtlu_layout::anchors(n);
      // bin index = number of anchors strictly below x
      const std::size_t bin = static_cast<std::size_t>(std::lower_bound(p, p + K, x) - p);
      const std::size_t ia = mtlu_layout::slope_index(n, bin), ib = mtlu_layout::intercept_index(n, bin);
      if (dp) {
        dp[ia] = x;
        dp[ib] = 1;
      }
      return {p[ia] * x + p[ib], p[ia]};
    }
    case Kind::elu:
      if (x > 0) return {x, 1};
      return {p[0] * std::expm1(x), p[0] * std::exp(x)};
    case Kind::selu:
      if (x > 0) return {p[0] * x, p[0]};
      return {p[0] * p[1] * std::expm1(x), p[0] * p[1] * std::exp(x)};
    case Kind::pelu: {
      const double a = p[0], b = p[1];
      if (x >= 0) {
        if (dp) {
          dp[0] = x / b;
          dp[1] = -a * x / (b * b);
        }
        return {a / b * x, a / b};
      }
      const double e = std::exp(x / b);
      if (dp) {
        dp[0] = std::expm1(x / b);
        dp[1] = -a * x / (b * b) * e;
      }
      return {a * std::expm1(x / b), a / b * e};
    }
    case Kind::celu: {
      if (x >= 0) return {x, 1};
      const double a = p[0];
      const double e = std::exp(x / a);
      if (dp) dp[0] = e * (1 - x / a) - 1;
      return {a * std::expm1(x / a), e};
    }
    case Kind::mpelu:
    case Kind::eelu: {
      const double a = p[0], b = p[1];
      if (x > 0) {
        const double slope = k == Kind::eelu ? p[3] : 1.0;
        return {slope * x, slope};
      }
      const double e = std::exp(b * x);
      if (dp) {
        dp[0] = std::expm1(b * x);
        dp[1] = a * x * e;
      }
      return {a * std::expm1(b * x), a * b * e};
    }
    case Kind::reu:
      if (x > 0) return {x, 1};
      return {x * std::exp(x), std::exp(x) * (1 + x)};
    case Kind::preu: {
      const double a = p[0], b = p[1];
      if (x > 0) {
        if (dp) dp[0] = x;
        return {a * x, a};
      }
      const double e = std::exp(b * x);
      if (dp) {
        dp[0] = x * e;
        dp[1] = a * x * x * e;
      }
      return {a * x * e, a * (1 + b * x) * e};
    }
    case Kind::felu: {
      if (x > 0) return {x, 1};
      const double e = std::exp2(x / num::ln2);
      if (dp) dp[0] = e - 1;
      return {p[0] * (e - 1), p[0] * e};
    }
    case Kind::pdelu: {
      if (x > 0) return {x, 1};
      const double a = p[0], t = p[1];
      const double base = 1 + (1 - t) * x;
      if (base <= 0) {
        if (dp) dp[0] = -1;
        return {-a, 0};
      }
      const double q = 1 / (1 - t);
      const double pw = std::pow(base, q);
      if (dp) dp[0] = pw - 1;
      return {a * (pw - 1), a * std::pow(base, q - 1)};
    }
    case Kind::elish: {
      const double s = logistic(x);
      if (x >= 0) return {x * s, s * (1 + x * (1 - s))};
      const double em = std::expm1(x);
      return {em * s, std::exp(x) * s + em * s * (1 - s)};
    }
    case Kind::hard_elish: {
      const double h = hard_sig_half(x);
      const double hd = (x > -1 && x < 1) ? 0.5 : 0.0;
      if (x >= 0) return {x * h, h + x * hd};
      const double em = std::expm1(x);
      return {em * h, std::exp(x) * h + em * hd};
    }
    case Kind::swish: {
      const double s = logistic(p[0] * x);
      if (dp) dp[0] = x * x * s * (1 - s);
      return {x * s, s + p[0] * x * s * (1 - s)};
    }
    case Kind::eswish: {
      const double s = logistic(x);
      if (dp) dp[0] = x * s;
      return {p[0] * x * s, p[0] * (s + x * s * (1 - s))};
    }
    case Kind::hard_swish_piecewise:
      if (x <= -3) return {0, 0};
      if (x >= 3) return {x, 1};
      return {x * (x + 3) / 6, (2 * x + 3) / 6};
    case Kind::hard_swish_beta: {
      const double b = p[0];
      const double h = 0.2 * b * x + 0.5;
      if (h < 0) return {0, 0};
      if (h > 1) return {2 * x, 2};
      if (dp) dp[0] = 0.4 * x * x;
      return {2 * x * h, 0.8 * b * x + 1};
    }
    case Kind::softplus:
      return {num::softplus(x), logistic(x)};
    case Kind::slu:
      if (x >= 0) return {p[1] * x, p[1]};
      return {p[0] * num::softplus(x) - p[2], p[0] * logistic(x)};
    case Kind::mish: {
      const double t = std::tanh(num::softplus(x));
      return {x * t, t + x * (1 - t * t) * logistic(x)};
    }
    case Kind::gelu_erf: {
      const double c = num::gaussian_cdf(x);
      return {x * c, c + x * num::gaussian_pdf(x)};
    }
    case Kind::gelu_tanh: {
      constexpr double kc = 0.7978845608028654;  // sqrt(2/pi)
      const double u = kc * (x + 0.044715 * x * x * x);
      const double t = std::tanh(u);
      return {0.5 * x * (1 + t), 0.5 * (1 + t) + 0.5 * x * (1 - t * t) * kc * (1 + 3 * 0.044715 * x * x)};
    }
    case Kind::gelu_sigmoid: {
      const double s = logistic(1.702 * x);
      return {x * s, s + 1.702 * x * s * (1 - s)};
    }
    case Kind::sgelu: {
      constexpr double kc = 0.7978845608028654;
      const double er = std::erf(x / std::numbers::sqrt2);
      return {p[0] * x * er, p[0] * (er + x * kc * std::exp(-0.5 * x * x))};
    }
    case Kind::identity:
      return {x, 1};
  }
  return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
}

/// Calls f(b) for every point where the piecewise definition switches
/// branch. Some of these are smooth joins; kinks are the subset where the
/// one-sided slopes (or values) disagree.
template <class F>
void for_each_breakpoint(Kind k, const double* p, std::size_t n, F&& f) {
  switch (k) {
    case Kind::ptanh: case Kind::hexpo: case Kind::relu: case Kind::leaky_relu: case Kind::prelu:
    case Kind::rrelu: case Kind::ptelu: case Kind::frelu: case Kind::vrelu: case Kind::softsign:
    case Kind::elliott: case Kind::elliott_unit: case Kind::sign_relu: case Kind::erelu:
    case Kind::eprelu: case Kind::nlrelu: case Kind::elu: case Kind::selu: case Kind::pelu:
    case Kind::celu: case Kind::mpelu: case Kind::reu: case Kind::preu: case Kind::felu:
    case Kind::eelu: case Kind::elish: case Kind::slu:
      f(0.0);
      break;
    case Kind::hard_sigmoid: f(-2.5); f(2.5); break;
    case Kind::hard_tanh: f(-1.0); f(1.0); break;
    case Kind::rt_relu: f(-p[1]); break;
    case Kind::rt_prelu: f(-p[2]); break;
    case Kind::shifted_relu: f(-1.0); break;
    case Kind::drelu: f(-p[0]); break;
    case Kind::s_shaped_relu: f(p[2]); f(p[0]); break;
    case Kind::lisa: case Kind::alisa: f(0.0); f(1.0); break;
    case Kind::brelu: case Kind::blrelu: f(0.0); f(p[0]); break;
    case Kind::bif: f(-p[0]); f(p[0]); break;
    case Kind::bbif: f(-p[1] - p[0] / 2); f(-p[0]); f(p[0]); f(p[1] + p[0] / 2); break;
    case Kind::reltanh: f(p[1]); f(p[0]); break;
    case Kind::plu: f(-p[1]); f(p[1]); break;
    case Kind::mtlu:
      for (std::size_t i = 0; i < mtlu_layout::anchors(n); ++i) f(p[i]);
      break;
    case Kind::pdelu:
      if (p[1] < 1) f(-1 / (1 - p[1]));
      f(0.0);
      break;
    case Kind::hard_elish: f(-1.0); f(0.0); f(1.0); break;
    case Kind::hard_swish_piecewise: f(-3.0); f(3.0); break;
    case Kind::hard_swish_beta:
      if (p[0] != 0) {
        const double b = 2.5 / std::abs(p[0]);
        f(-b);
        f(b);
      }
      break;
    default:
      break;
  }
}

inline double side_offset(double b) { return 1e-9 * std::max(1.0, std::abs(b)); }

/// True when value or slope differ on the two sides of breakpoint b.
inline bool is_kink(Kind k, const double* p, std::size_t n, double b) {
  const double h = side_offset(b);
  const Pt l = core(k, p, n, b - h, nullptr);
  const Pt r = core(k, p, n, b + h, nullptr);
  const double tol = 1e-6;
  return std::abs(l.d - r.d) > tol * std::max({1.0, std::abs(l.d), std::abs(r.d)}) ||
         std::abs(l.v - r.v) > tol * std::max({1.0, std::abs(l.v), std::abs(r.v)});
}

/// core() plus the subgradient convention at an exact kink: the slope is
/// min + c * (max - min), and parameter partials take the same weighting of
/// their one-sided values.
inline Pt core_at(Kind k, const double* p, std::size_t n, double x, double* dp, double c, bool strict) {
  bool at_kink = false;
  double kink = 0;
  for_each_breakpoint(k, p, n, [&](double b) {
    if (std::abs(x - b) < 1e-9 && (strict || x == b) && is_kink(k, p, n, b)) {
      if (strict)
        throw KinkProximity(std::string(name(k)) + ": derivative requested at kink x=" + std::to_string(b));
      at_kink = true;
      kink = b;
    }
  });
  Pt out = core(k, p, n, x, dp);
  if (!at_kink) return out;
  const double h = side_offset(kink);
  std::vector<double> dl, dr;
  if (dp) {
    dl.assign(n, 0.0);
    dr.assign(n, 0.0);
  }
  const Pt l = core(k, p, n, x - h, dp ? dl.data() : nullptr);
  const Pt r = core(k, p, n, x + h, dp ? dr.data() : nullptr);
  const double wr = r.d >= l.d ? c : 1 - c;  // weight on the right-hand side
  out.d = (1 - wr) * l.d + wr * r.d;
  if (l.d == r.d) out.d = l.d;
  if (dp)
    for (std::size_t i = 0; i < n; ++i) dp[i] = (1 - wr) * dl[i] + wr * dr[i];
  return out;
}

template <class F>
double golden_argmin(F&& f, double a, double b) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double min_value(Kind k, const double* p, std::size_t n, double a, double b) {
  auto f = [&](double x) { return core(k, p, n, x, nullptr).v; };
  return f(golden_argmin(f, a, b));
}

inline double max_value(Kind k, const double* p, std::size_t n, double a, double b) {
  auto f = [&](double x) { return -core(k, p, n, x, nullptr).v; };
  return -f(golden_argmin(f, a, b));
}

inline void check_input(Kind k, double x) {
  if (!std::isfinite(x)) throw NonFiniteInput(std::string(name(k)) + ": input is not finite");
}

inline void check_kind(Kind k, const ParamSet& p) {
  if (p.kind != k)
    throw InvalidParameter(std::string(name(k)) + ": parameter set belongs to " + std::string(name(p.kind)));
}

}  // namespace detail

/// Value without validation or sampling. The sampled slot of p is used as is.
inline double eval_unchecked(Kind k, std::span<const double> p, double x) {
  return detail::core(k, p.data(), p.size(), x, nullptr).v;
}

/// Parameters actually used for one evaluation under ctx: eval mode
/// substitutes expectations, train mode draws according to the sample scope.
inline ParamSet effective_params(const ParamSet& p, EvalContext& ctx) {
  if (!is_stochastic(p.kind)) return p;
  if (ctx.mode == Mode::eval) return eval_mode_params(p);
  ParamSet out = p;
  const std::size_t i = *sampled_index(p.kind);
  if (ctx.scope == SampleScope::per_call) {
    out[i] = sample_coefficient(p, ctx.rng);
  } else {
    if (!ctx.batch_draw) ctx.batch_draw = sample_coefficient(p, ctx.rng);
    out[i] = *ctx.batch_draw;
  }
  return out;
}

inline double eval(Kind k, const ParamSet& p, double x, EvalContext& ctx) {
  detail::check_kind(k, p);
  validate(p);
  detail::check_input(k, x);
  if (!is_stochastic(k)) return eval_unchecked(k, p.values, x);
  const ParamSet q = effective_params(p, ctx);
  return eval_unchecked(k, q.values, x);
}

/// Eval-mode evaluation.
inline double eval(Kind k, const ParamSet& p, double x) {
  EvalContext ctx;
  return eval(k, p, x, ctx);
}

inline double eval(Kind k, double x) { return eval(k, default_params(k), x); }

// ---------------------------------------------------------------------------

struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double v) const {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }
  /// Containment with both ends treated as closed.
  bool contains_closure(double v) const { return v >= lo && v <= hi; }
};

struct ActivationDescriptor {
  Kind kind;
  Family family;
  std::string_view anchor;
  Range range;
  /// Limits of the value as x -> -inf / +inf; NaN where the value diverges.
  double limit_neg;
  double limit_pos;
  bool monotonic;
  bool smooth;
  bool bounded;
  bool stochastic;
  bool has_learnable;
  std::vector<double> kinks;
  std::vector<double> breakpoints;
};

/// Points where the kind is continuous-but-not-differentiable, or jumps.
inline std::vector<double> kinks(const ParamSet& p) {
  std::vector<double> out;
  const ParamSet q = is_stochastic(p.kind) ? eval_mode_params(p) : p;
  detail::for_each_breakpoint(q.kind, q.values.data(), q.size(), [&](double b) {
    if (detail::is_kink(q.kind, q.values.data(), q.size(), b)) out.push_back(b);
  });
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> breakpoints(const ParamSet& p) {
  std::vector<double> out;
  const ParamSet q = is_stochastic(p.kind) ? eval_mode_params(p) : p;
  detail::for_each_breakpoint(q.kind, q.values.data(), q.size(), [&](double b) { out.push_back(b); });
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline Range open(double lo, double hi) { return {lo, hi, false, false}; }
inline Range closed(double lo, double hi) { return {lo, hi, true, true}; }
inline Range lo_closed(double lo) { return {lo, inf, true, false}; }
inline Range lo_open(double lo) { return {lo, inf, false, false}; }
inline Range hi_closed(double hi) { return {-inf, hi, false, true}; }
inline Range all() { return {}; }

/// Declared output range, in eval mode for stochastic kinds.
inline Range range_of(const ParamSet& ps) {
  const double* p = ps.values.data();
  const std::size_t n = ps.size();
  const Kind k = ps.kind;
  switch (k) {
    case Kind::logistic: case Kind::psf: case Kind::elliott_unit: return open(0, 1);
    case Kind::tanh: case Kind::hard_tanh: return closed(-1, 1);
    case Kind::stanh: return closed(-std::abs(p[0]), std::abs(p[0]));
    case Kind::resech: {
      const double m = max_value(k, p, n, 0, 5);
      return closed(-m, m);
    }
    case Kind::ssigmoid: return open(-2, 2);
    case Kind::ptanh: return open(-p[0], 1);
    case Kind::hexpo:
      if (p[1] > 0 && p[3] > 0) return open(std::min(-p[2], p[0]), std::max(-p[2], p[0]));
      return all();
    case Kind::silu: return lo_closed(min_value(k, p, n, -5, 0));
    case Kind::dsilu: return closed(min_value(k, p, n, -10, 0), max_value(k, p, n, 0, 10));
    case Kind::lisht: case Kind::relu: case Kind::vrelu: case Kind::rt_relu: case Kind::erelu:
    case Kind::bif: case Kind::nlrelu:
      return lo_closed(0);
    case Kind::elliott: case Kind::melliott: case Kind::softsign: return open(-1, 1);
    case Kind::srs: return {p[0] * p[1] / (p[1] - p[0] * num::e), p[0], true, false};
    case Kind::hard_sigmoid: return closed(0, 1);
    case Kind::leaky_relu: case Kind::prelu: case Kind::rrelu: case Kind::rt_prelu: case Kind::eprelu:
    case Kind::blrelu: case Kind::reltanh: case Kind::identity:
      return all();
    case Kind::ptelu:
      if (p[0] > 0 && p[1] > 0) return lo_open(-p[0]);
      return lo_closed(0);
    case Kind::frelu: return lo_closed(p[0]);
    case Kind::shifted_relu: return lo_closed(-1);
    case Kind::drelu: return lo_closed(-p[0]);
    case Kind::sign_relu:
      if (p[0] > 0) return lo_open(-p[0]);
      return lo_closed(0);
    case Kind::blu:
      if (p[0] == 1) return lo_open(-1);
      if (p[0] == -1) return {-inf, 1, false, false};
      return all();
    case Kind::s_shaped_relu: {
      const double a = p[1], b = p[3];
      Range r;
      if (!(b > 0 || a < 0)) r.lo = p[2], r.lo_closed = true;
      if (!(a > 0 || b < 0)) r.hi = p[0], r.hi_closed = true;
      return r;
    }
    case Kind::lisa: case Kind::alisa: {
      const double a1 = p[0], a2 = p[1];
      Range r;
      if (!(a2 > 0 || a1 < 0)) r.lo = 0, r.lo_closed = true;
      if (!(a1 > 0 || a2 < 0)) r.hi = 1, r.hi_closed = true;
      return r;
    }
    case Kind::brelu: return closed(0, p[0]);
    case Kind::bbif: return closed(0, p[1]);
    case Kind::plu:
      if (p[0] > 0) return all();
      return closed(-p[1], p[1]);
    case Kind::mtlu: {
      const std::size_t K = mtlu_layout::anchors(n);
      const double aL = p[mtlu_layout::slope_index(n, 0)], aR = p[mtlu_layout::slope_index(n, K)];
      double lo = inf, hi = -inf;
      for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t bin : {i, i + 1}) {
          const double v = p[mtlu_layout::slope_index(n, bin)] * p[i] + p[mtlu_layout::intercept_index(n, bin)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      Range r = closed(lo, hi);
      if (aL > 0 || aR < 0) r.lo = -inf, r.lo_closed = false;
      if (aR > 0 || aL < 0) r.hi = inf, r.hi_closed = false;
      return r;
    }
    case Kind::elu: return p[0] > 0 ? lo_open(-p[0]) : lo_closed(0);
    case Kind::selu: return lo_open(-p[0] * std::max(p[1], 0.0));
    case Kind::pelu: return lo_open(-p[0]);
    case Kind::celu: case Kind::felu: return p[0] > 0 ? lo_open(-p[0]) : lo_closed(0);
    case Kind::mpelu: case Kind::eelu:
      if (p[1] > 0) return p[0] > 0 ? lo_open(-p[0]) : lo_closed(0);
      return p[0] > 0 ? lo_closed(0) : all();
    case Kind::reu: return lo_closed(-1 / num::e);
    case Kind::preu:
      if (p[0] > 0 && p[1] > 0) return lo_closed(-p[0] / (p[1] * num::e));
      return all();
    case Kind::pdelu:
      if (p[1] < 1) return lo_closed(-p[0]);
      return lo_open(-p[0]);
    case Kind::elish: return lo_closed(min_value(k, p, n, -5, 0));
    case Kind::hard_elish: return lo_closed(min_value(k, p, n, -1, 0));
    case Kind::swish:
    case Kind::eswish: {
      const double scale = k == Kind::swish ? p[0] : 1 / p[0];
      if (scale == 0) return all();
      const double m = min_value(Kind::silu, nullptr, 0, -5, 0);
      if (scale > 0) return lo_closed(m / scale);
      return hi_closed(m / scale);
    }
    case Kind::hard_swish_piecewise: return lo_closed(-0.375);
    case Kind::hard_swish_beta:
      if (p[0] > 0) return lo_closed(-0.625 / p[0]);
      if (p[0] < 0) return hi_closed(-0.625 / p[0]);
      return all();
    case Kind::softplus: return lo_open(0);
    case Kind::slu:
      if (p[0] >= 0 && p[1] > 0) {
        if (-p[2] < 0) return lo_open(-p[2]);
        return lo_closed(0);
      }
      return all();
    case Kind::mish: return lo_closed(min_value(k, p, n, -5, 0));
    case Kind::gelu_erf: case Kind::gelu_tanh: case Kind::gelu_sigmoid:
      return lo_closed(min_value(k, p, n, -5, 0));
    case Kind::sgelu:
      if (p[0] >= 0) return lo_closed(0);
      return hi_closed(0);
  }
  return all();
}

inline std::pair<double, double> limits_of(const ParamSet& ps) {
  const double* p = ps.values.data();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (ps.kind) {
    case Kind::logistic: case Kind::psf: case Kind::elliott_unit: case Kind::hard_sigmoid: return {0, 1};
    case Kind::tanh: case Kind::elliott: case Kind::melliott: case Kind::softsign: case Kind::hard_tanh:
      return {-1, 1};
    case Kind::stanh: return {-p[0], p[0]};
    case Kind::resech: return {0, 0};
    case Kind::ssigmoid: return {-2, 2};
    case Kind::ptanh: return {-p[0], 1};
    case Kind::hexpo: return {-p[2], p[0]};
    case Kind::dsilu: return {0, 1};
    case Kind::srs: return {0, p[0]};
    case Kind::brelu: return {0, p[0]};
    case Kind::bbif: return {p[1], p[1]};
    default: break;
  }
  // Unbounded kinds: a tail that settles between 1e6 and 1e9 has a limit.
  auto tail = [&](double sign) {
    const double a = core(ps.kind, p, ps.size(), sign * 1e6, nullptr).v;
    const double b = core(ps.kind, p, ps.size(), sign * 1e9, nullptr).v;
    if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a - b) > 1e-5 * std::max(1.0, std::abs(b))) return nan;
    return std::abs(b) < 1e-12 ? 0.0 : b;
  };
  return {tail(-1), tail(1)};
}

inline bool monotonic_of(const ParamSet& ps) {
  const double* p = ps.values.data();
  const std::size_t n = ps.size();
  switch (ps.kind) {
    case Kind::resech: case Kind::silu: case Kind::dsilu: case Kind::lisht: case Kind::srs:
    case Kind::vrelu: case Kind::bif: case Kind::bbif: case Kind::reu: case Kind::preu: case Kind::elish:
    case Kind::hard_elish: case Kind::eswish: case Kind::hard_swish_piecewise: case Kind::mish:
    case Kind::gelu_erf: case Kind::gelu_tanh: case Kind::gelu_sigmoid: case Kind::sgelu:
      return false;
    case Kind::swish: case Kind::hard_swish_beta: return p[0] == 0;
    case Kind::stanh: return p[0] * p[1] >= 0;
    case Kind::ptanh: case Kind::leaky_relu: case Kind::prelu: case Kind::sign_relu: return p[0] >= 0;
    case Kind::hexpo: return p[0] / p[1] >= 0 && p[2] / p[3] >= 0;
    case Kind::rt_prelu: return p[1] >= 0;
    case Kind::eprelu: return p[1] >= 0;
    case Kind::blu: return std::abs(p[0]) <= 1;
    case Kind::s_shaped_relu: return p[1] >= 0 && p[3] >= 0;
    case Kind::lisa: case Kind::alisa: return p[0] >= 0 && p[1] >= 0;
    case Kind::plu: return p[0] >= 0;
    case Kind::mtlu: {
      const std::size_t K = mtlu_layout::anchors(n);
      for (std::size_t b = 0; b <= K; ++b)
        if (p[mtlu_layout::slope_index(n, b)] < 0) return false;
      for (std::size_t i = 0; i < K; ++i) {
        const double l = p[mtlu_layout::slope_index(n, i)] * p[i] + p[mtlu_layout::intercept_index(n, i)];
        const double r = p[mtlu_layout::slope_index(n, i + 1)] * p[i] + p[mtlu_layout::intercept_index(n, i + 1)];
        if (r < l) return false;
      }
      return true;
    }
    case Kind::elu: case Kind::celu: case Kind::felu: return p[0] >= 0;
    case Kind::selu: return p[0] >= 0 && p[1] >= 0;
    case Kind::pelu: return p[0] / p[1] >= 0;
    case Kind::mpelu: case Kind::eelu: return p[0] * p[1] >= 0;
    case Kind::pdelu: return p[0] >= 0;
    case Kind::slu: return p[0] >= 0 && p[1] >= 0;
    default: return true;
  }
}

}  // namespace detail

inline ActivationDescriptor descriptor(const ParamSet& params) {
  const ParamSet p = is_stochastic(params.kind) ? eval_mode_params(params) : params;
  const KindInfo& ki = info(p.kind);
  ActivationDescriptor d{p.kind, ki.family, ki.anchor, detail::range_of(p), 0, 0, detail::monotonic_of(p),
                         false, false, ki.family == Family::stochastic, !learnable_indices(p).empty(),
                         kinks(p), breakpoints(p)};
  std::tie(d.limit_neg, d.limit_pos) = detail::limits_of(p);
  d.smooth = d.kinks.empty();
  d.bounded = d.range.bounded();
  return d;
}

inline ActivationDescriptor descriptor(Kind k) { return descriptor(default_params(k)); }

}  // namespace actlib
