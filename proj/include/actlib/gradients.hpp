#pragma once

// Analytic derivatives, the central-difference oracle and the gradient-check
// harness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actlib/catalog.hpp"
#include "actlib/error.hpp"
#include "actlib/kinds.hpp"
#include "actlib/numeric.hpp"

namespace actlib {

/// Value, input derivative and learnable-parameter partials at one point.
struct GradBundle {
  Kind kind = Kind::identity;
  double value = 0;
  double d_dx = 0;
  /// Aligned with the flattened ParamSet; entries for non-learnable
  /// parameters are zero.
  std::vector<double> d_dparam;
  std::vector<std::string> param_names;
  std::vector<std::size_t> learnable;

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (std::size_t i : learnable) out.push_back(param_names[i]);
    return out;
  }

  /// Partial with respect to a learnable parameter; throws for other names.
  double d(std::string_view nm) const {
    for (std::size_t i : learnable)
      if (param_names[i] == nm) return d_dparam[i];
    throw InvalidParameter(std::string(name(kind)) + ": no learnable parameter named '" + std::string(nm) + "'");
  }
};

namespace detail {

/// Value, d/dx and parameter partials without validation. dp must have n
/// zeros or be empty.
inline Pt grad_unchecked(Kind k, std::span<const double> p, double x, std::span<double> dp, double subgradient,
                         bool strict = false) {
  return core_at(k, p.data(), p.size(), x, dp.empty() ? nullptr : dp.data(), subgradient, strict);
}

}  // namespace detail

inline GradBundle grad(Kind k, const ParamSet& p, double x, EvalContext& ctx) {
  detail::check_kind(k, p);
  validate(p);
  detail::check_input(k, x);
  const ParamSet q = effective_params(p, ctx);
  GradBundle g;
  g.kind = k;
  g.d_dparam.assign(q.size(), 0.0);
  const detail::Pt r = detail::grad_unchecked(k, q.values, x, g.d_dparam, ctx.subgradient, ctx.strict_kinks);
  g.value = r.v;
  g.d_dx = r.d;
  g.param_names = param_names(q);
  g.learnable = learnable_indices(q);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (param_role(k, q.size(), i) != Role::learnable) g.d_dparam[i] = 0;
  return g;
}

inline GradBundle grad(Kind k, const ParamSet& p, double x) {
  EvalContext ctx;
  return grad(k, p, x, ctx);
}

inline GradBundle grad(Kind k, double x) { return grad(k, default_params(k), x); }

/// Mish derivative written through its closed-form intermediates.
namespace mish {
inline double omega(double x) {
  return 4 * (x + 1) + 4 * std::exp(2 * x) + std::exp(3 * x) + std::exp(x) * (4 * x + 6);
}
inline double delta(double x) { return 2 * std::exp(x) + std::exp(2 * x) + 2; }
inline double derivative(double x) {
  const double d = delta(x);
  return omega(x) * std::exp(x) / (d * d);
}
}  // namespace mish

/// Central difference (f(x+h) - f(x-h)) / 2h of the activation value.
inline double fd_oracle(Kind k, const ParamSet& p, double x, EvalContext& ctx, double h = 1e-5) {
  detail::check_kind(k, p);
  validate(p);
  detail::check_input(k, x);
  if (!(h >= 1e-8 && h <= 1e-3)) throw InvalidParameter("fd_oracle: step must lie in [1e-8, 1e-3]");
  const ParamSet q = effective_params(p, ctx);
  for (double kink : kinks(q))
    if (std::abs(x - kink) <= 10 * h)
      throw KinkProximity(std::string(name(k)) + ": stencil within 10h of kink at " + std::to_string(kink));
  return (eval_unchecked(k, q.values, x + h) - eval_unchecked(k, q.values, x - h)) / (2 * h);
}

inline double fd_oracle(Kind k, const ParamSet& p, double x, double h = 1e-5) {
  EvalContext ctx;
  return fd_oracle(k, p, x, ctx, h);
}

// ---------------------------------------------------------------------------
// Gradient-check harness. Works on any scalar function of (params, x) with
// analytic partials, so the composite units reuse it.

struct Checkable {
  std::string label;
  std::vector<double> params;
  std::vector<std::string> names;
  std::vector<bool> learnable;
  std::function<double(std::span<const double>, double)> value;
  /// Returns d/dx; writes partials for every parameter into the span.
  std::function<double(std::span<const double>, double, std::span<double>)> grad;
  std::vector<double> breakpoints;
};

struct ParamCheck {
  std::string name;
  double max_rel_error = 0;
  double worst_x = 0;
};

struct GradCheckReport {
  std::string label;
  std::size_t samples = 0;
  double max_rel_error = 0;
  double worst_x = 0;
  std::string worst_quantity = "x";
  double tolerance = 0;
  bool pass = true;
  std::vector<std::pair<double, double>> excluded;
  std::vector<ParamCheck> params;
};

inline constexpr double grad_check_step = 1e-5;
inline constexpr double kink_guard = 1e-3;

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

inline GradCheckReport grad_check(const Checkable& c, double lo, double hi, std::size_t n, double tol) {
  GradCheckReport rep;
  rep.label = c.label;
  rep.tolerance = tol;
  for (double b : c.breakpoints)
    if (b >= lo - kink_guard && b <= hi + kink_guard) rep.excluded.emplace_back(b - kink_guard, b + kink_guard);
  std::sort(rep.excluded.begin(), rep.excluded.end());
  for (std::size_t i = 0; i < c.params.size(); ++i)
    if (c.learnable[i]) rep.params.push_back({c.names[i], 0, 0});

  const double h = grad_check_step;
  std::vector<double> pw = c.params;
  std::vector<double> dp(c.params.size());
  auto note = [&](double err, double x, const std::string& what) {
    if (err > rep.max_rel_error || !std::isfinite(err)) {
      rep.max_rel_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
      rep.worst_x = x;
      rep.worst_quantity = what;
    }
  };
  for (std::size_t i = 0; rep.samples < n && i < 20 * n; ++i) {
    const double x = num::kronecker_point(i, lo, hi);
    bool guarded = false;
    for (const auto& [a, b] : rep.excluded)
      if (x >= a && x <= b) guarded = true;
    if (guarded) continue;
    ++rep.samples;

    std::fill(dp.begin(), dp.end(), 0.0);
    const double ad = c.grad(c.params, x, dp);
    const double nd = (c.value(c.params, x + h) - c.value(c.params, x - h)) / (2 * h);
    note(rel_error(ad, nd), x, "x");

    std::size_t slot = 0;
    for (std::size_t j = 0; j < c.params.size(); ++j) {
      if (!c.learnable[j]) continue;
      const double hp = h * std::max(1.0, std::abs(c.params[j]));
      pw[j] = c.params[j] + hp;
      const double up = c.value(pw, x);
      pw[j] = c.params[j] - hp;
      const double dn = c.value(pw, x);
      pw[j] = c.params[j];
      const double err = rel_error(dp[j], (up - dn) / (2 * hp));
      auto& pc = rep.params[slot++];
      if (err > pc.max_rel_error || !std::isfinite(err)) {
        pc.max_rel_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
        pc.worst_x = x;
      }
      note(err, x, c.names[j]);
    }
  }
  rep.pass = rep.max_rel_error <= tol && rep.samples == n;
  return rep;
}

/// Checkable view of a catalog kind; stochastic kinds are checked with their
/// eval-mode coefficients.
inline Checkable checkable(const ParamSet& params) {
  validate(params);
  const ParamSet p = is_stochastic(params.kind) ? eval_mode_params(params) : params;
  const Kind k = p.kind;
  Checkable c;
  c.label = std::string(name(k));
  c.params = p.values;
  c.names = param_names(p);
  for (std::size_t i = 0; i < p.size(); ++i) c.learnable.push_back(param_role(k, p.size(), i) == Role::learnable);
  c.value = [k](std::span<const double> q, double x) { return eval_unchecked(k, q, x); };
  c.grad = [k](std::span<const double> q, double x, std::span<double> dp) {
    return detail::core(k, q.data(), q.size(), x, dp.data()).d;
  };
  c.breakpoints = breakpoints(p);
  return c;
}

inline GradCheckReport grad_check(Kind k, const ParamSet& p, double lo, double hi, std::size_t n, double tol) {
  detail::check_kind(k, p);
  if (n < 100) throw InvalidParameter("grad_check: at least 100 samples required");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw InvalidParameter("grad_check: finite domain lo < hi required");
  return grad_check(checkable(p), lo, hi, n, tol);
}

/// Deterministic perturbation number `which` of a parameter vector. All
/// non-sampled entries move first; if that breaks an invariant only the
/// learnable ones move, and the perturbation is halved until `valid` accepts.
template <class Valid>
std::vector<double> perturb_values(const std::vector<double>& base, const std::vector<Role>& roles, int which,
                                   Valid&& valid) {
  for (int pass = 0; pass < 2; ++pass) {
    double scale = 1.0;
    for (int attempt = 0; attempt < 12; ++attempt, scale *= 0.5) {
      std::vector<double> v = base;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (roles[j] == Role::sampled) continue;
        if (pass == 1 && roles[j] != Role::learnable) continue;
        const double s = num::kronecker_point(static_cast<std::size_t>(which) * 31 + j * 7 + 3, -1.0, 1.0);
        v[j] = base[j] * (1 + 0.15 * scale * s) + 0.1 * scale * s;
      }
      if (valid(v)) return v;
    }
  }
  return base;
}

inline ParamSet perturbed_params(const ParamSet& p, int which) {
  std::vector<Role> roles;
  for (std::size_t i = 0; i < p.size(); ++i) roles.push_back(param_role(p.kind, p.size(), i));
  auto v = perturb_values(p.values, roles, which, [&](const std::vector<double>& q) {
    try {
      validate(ParamSet{p.kind, q});
      return true;
    } catch (const InvalidParameter&) {
      return false;
    }
  });
  return ParamSet{p.kind, std::move(v)};
}

}  // namespace actlib
