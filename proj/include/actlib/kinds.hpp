#pragma once

// The closed set of scalar activation kinds, their parameter schemas and
// default parameter values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actlib/error.hpp"
#include "actlib/numeric.hpp"

namespace actlib {

enum class Kind {
  // sigmoid family
  logistic, tanh, stanh, psf, resech, ssigmoid, ptanh, hexpo, silu, dsilu,
  lisht, elliott, elliott_unit, melliott, srs, hard_sigmoid, hard_tanh,
  // ReLU family
  relu, leaky_relu, prelu, rrelu, ptelu, frelu, rt_relu, rt_prelu,
  shifted_relu, drelu, vrelu, softsign, sign_relu, blu, s_shaped_relu, erelu,
  eprelu, lisa, alisa, brelu, blrelu, bif, bbif, reltanh, plu, nlrelu, mtlu,
  // ELU family
  elu, selu, pelu, celu, mpelu, reu, preu, felu, eelu, pdelu, elish,
  hard_elish,
  // miscellaneous
  swish, eswish, hard_swish_piecewise, hard_swish_beta, softplus, slu, mish,
  gelu_erf, gelu_tanh, gelu_sigmoid, sgelu,
  identity,
};

inline constexpr std::size_t kind_count = static_cast<std::size_t>(Kind::identity) + 1;

enum class Family { fixed, parametric, adaptive, stochastic };

/// hyper: fixed during training. learnable: updated by the optimizer.
/// sampled: redrawn from a distribution in train mode, replaced by its
/// expectation in eval mode; never trained.
enum class Role { hyper, learnable, sampled };

struct ParamSpec {
  std::string_view name;
  Role role;
  double default_value;
};

struct KindInfo {
  Kind kind;
  std::string_view name;    // stable snake-case identifier
  std::string_view anchor;  // defining equation
  Family family;
  std::span<const ParamSpec> params;
};

namespace detail {

using R = Role;
inline constexpr ParamSpec p_stanh[] = {{"B", R::hyper, 1.7159}, {"A", R::hyper, 2.0 / 3.0}};
inline constexpr ParamSpec p_psf[] = {{"m", R::hyper, 2.0}};
inline constexpr ParamSpec p_ptanh[] = {{"a", R::hyper, 0.25}};
inline constexpr ParamSpec p_hexpo[] = {
    {"a", R::hyper, 1.0}, {"b", R::hyper, 1.0}, {"c", R::hyper, 1.0}, {"d", R::hyper, 1.0}};
inline constexpr ParamSpec p_srs[] = {{"alpha", R::learnable, 2.0}, {"beta", R::learnable, 3.0}};
inline constexpr ParamSpec p_leaky[] = {{"alpha", R::hyper, 0.01}};
inline constexpr ParamSpec p_prelu[] = {{"alpha", R::learnable, 0.25}};
inline constexpr ParamSpec p_rrelu[] = {
    {"l", R::hyper, 0.125}, {"u", R::hyper, 1.0 / 3.0}, {"r", R::sampled, (0.125 + 1.0 / 3.0) / 2.0}};
inline constexpr ParamSpec p_ptelu[] = {{"alpha", R::learnable, 1.0}, {"beta", R::learnable, 1.0}};
inline constexpr ParamSpec p_frelu[] = {{"b", R::learnable, 0.0}};
inline constexpr ParamSpec p_rt_relu[] = {{"sigma", R::hyper, 0.75}, {"a", R::sampled, 0.0}};
inline constexpr ParamSpec p_rt_prelu[] = {
    {"sigma", R::hyper, 0.75}, {"k", R::learnable, 0.25}, {"a", R::sampled, 0.0}};
inline constexpr ParamSpec p_drelu[] = {{"delta", R::hyper, 0.05}};
inline constexpr ParamSpec p_sign_relu[] = {{"a", R::hyper, 1.0}};
inline constexpr ParamSpec p_blu[] = {{"beta", R::learnable, 0.5}};
inline constexpr ParamSpec p_srelu[] = {
    {"r", R::learnable, 1.0}, {"a", R::learnable, 0.5}, {"l", R::learnable, -1.0}, {"b", R::learnable, 0.1}};
inline constexpr ParamSpec p_erelu[] = {{"alpha", R::hyper, 0.1}, {"R", R::sampled, 1.0}};
inline constexpr ParamSpec p_eprelu[] = {
    {"alpha", R::hyper, 0.1}, {"a", R::learnable, 0.25}, {"R", R::sampled, 1.0}};
inline constexpr ParamSpec p_lisa[] = {{"alpha1", R::hyper, 0.5}, {"alpha2", R::hyper, 0.1}};
inline constexpr ParamSpec p_alisa[] = {{"alpha1", R::learnable, 0.5}, {"alpha2", R::learnable, 0.1}};
inline constexpr ParamSpec p_brelu[] = {{"A", R::hyper, 6.0}};
inline constexpr ParamSpec p_blrelu[] = {{"A", R::hyper, 1.0}};
inline constexpr ParamSpec p_bif[] = {{"a", R::hyper, 1.0}};
inline constexpr ParamSpec p_bbif[] = {{"a", R::hyper, 1.0}, {"b", R::hyper, 2.0}};
inline constexpr ParamSpec p_reltanh[] = {
    {"lambda_pos", R::learnable, 0.5},       {"lambda_neg", R::learnable, -1.5},
    {"lambda_pos_lower", R::hyper, 0.0},     {"lambda_pos_upper", R::hyper, 1.0},
    {"lambda_neg_lower", R::hyper, -3.0},    {"lambda_neg_upper", R::hyper, -0.5}};
inline constexpr ParamSpec p_plu[] = {{"alpha", R::hyper, 0.1}, {"c", R::hyper, 1.0}};
inline constexpr ParamSpec p_nlrelu[] = {{"beta", R::hyper, 1.0}};
inline constexpr ParamSpec p_elu[] = {{"alpha", R::hyper, 1.0}};
inline constexpr ParamSpec p_selu[] = {{"lambda", R::hyper, 1.0507}, {"alpha", R::hyper, 1.67326}};
inline constexpr ParamSpec p_pelu[] = {{"a", R::learnable, 1.0}, {"b", R::learnable, 1.0}};
inline constexpr ParamSpec p_celu[] = {{"alpha", R::learnable, 1.0}};
inline constexpr ParamSpec p_mpelu[] = {{"alpha", R::learnable, 1.0}, {"beta", R::learnable, 1.0}};
inline constexpr ParamSpec p_preu[] = {{"alpha", R::learnable, 1.0}, {"beta", R::learnable, 1.0}};
inline constexpr ParamSpec p_felu[] = {{"alpha", R::learnable, 1.0}};
inline constexpr ParamSpec p_eelu[] = {
    {"alpha", R::learnable, 1.0}, {"beta", R::learnable, 1.0}, {"epsilon", R::hyper, 1.0}, {"k", R::sampled, 1.0}};
inline constexpr ParamSpec p_pdelu[] = {{"alpha", R::learnable, 1.0}, {"t", R::hyper, 0.9}};
inline constexpr ParamSpec p_swish[] = {{"beta", R::learnable, 1.0}};
inline constexpr ParamSpec p_eswish[] = {{"beta", R::learnable, 1.25}};
inline constexpr ParamSpec p_hswish_beta[] = {{"beta", R::learnable, 1.0}};
inline constexpr ParamSpec p_slu[] = {
    {"alpha", R::hyper, 2.0}, {"beta", R::hyper, 1.0}, {"gamma", R::hyper, 2.0 * num::ln2}};
inline constexpr ParamSpec p_sgelu[] = {{"alpha", R::hyper, 1.702}};

using F = Family;
inline constexpr KindInfo kind_table[] = {
    {Kind::logistic, "logistic", "Eq (1.1)", F::fixed, {}},
    {Kind::tanh, "tanh", "Eq (4.1)", F::fixed, {}},
    {Kind::stanh, "stanh", "Eq (6)", F::parametric, p_stanh},
    {Kind::psf, "psf", "Eq (7)", F::parametric, p_psf},
    {Kind::resech, "resech", "Eq (10)", F::fixed, {}},
    {Kind::ssigmoid, "ssigmoid", "Eq (12)", F::fixed, {}},
    {Kind::ptanh, "ptanh", "Eq (13)", F::parametric, p_ptanh},
    {Kind::hexpo, "hexpo", "Eq (14.1)", F::parametric, p_hexpo},
    {Kind::silu, "silu", "Eq (15)", F::fixed, {}},
    {Kind::dsilu, "dsilu", "Eq (16)", F::fixed, {}},
    {Kind::lisht, "lisht", "Eq (17.1)", F::fixed, {}},
    {Kind::elliott, "elliott", "Eq (18.1)", F::fixed, {}},
    {Kind::elliott_unit, "elliott_unit", "Eq (18.2)", F::fixed, {}},
    {Kind::melliott, "melliott", "Eq (19)", F::fixed, {}},
    {Kind::srs, "srs", "Eq (20.1)", F::adaptive, p_srs},
    {Kind::hard_sigmoid, "hard_sigmoid", "Eq (25)", F::fixed, {}},
    {Kind::hard_tanh, "hard_tanh", "Eq (26.1)", F::fixed, {}},
    {Kind::relu, "relu", "Eq (27.1)", F::fixed, {}},
    {Kind::leaky_relu, "leaky_relu", "Eq (29.1)", F::parametric, p_leaky},
    {Kind::prelu, "prelu", "Eq (30.1)", F::adaptive, p_prelu},
    {Kind::rrelu, "rrelu", "Eq (31)", F::stochastic, p_rrelu},
    {Kind::ptelu, "ptelu", "Eq (33)", F::adaptive, p_ptelu},
    {Kind::frelu, "frelu", "Eq (34.1)", F::adaptive, p_frelu},
    {Kind::rt_relu, "rt_relu", "Eq (36)", F::stochastic, p_rt_relu},
    {Kind::rt_prelu, "rt_prelu", "Eq (38)", F::stochastic, p_rt_prelu},
    {Kind::shifted_relu, "shifted_relu", "Eq (39)", F::fixed, {}},
    {Kind::drelu, "drelu", "Eq (40)", F::parametric, p_drelu},
    {Kind::vrelu, "vrelu", "Eq (41)", F::fixed, {}},
    {Kind::softsign, "softsign", "Eq (42.1)", F::fixed, {}},
    {Kind::sign_relu, "sign_relu", "Eq (43)", F::parametric, p_sign_relu},
    {Kind::blu, "blu", "Eq (44.1)", F::adaptive, p_blu},
    {Kind::s_shaped_relu, "s_shaped_relu", "Eq (47.1)", F::adaptive, p_srelu},
    {Kind::erelu, "erelu", "Eq (48)", F::stochastic, p_erelu},
    {Kind::eprelu, "eprelu", "Eq (49.1)", F::stochastic, p_eprelu},
    {Kind::lisa, "lisa", "Eq (50.1)", F::parametric, p_lisa},
    {Kind::alisa, "alisa", "Eq (53.1)", F::adaptive, p_alisa},
    {Kind::brelu, "brelu", "Eq (54.1)", F::parametric, p_brelu},
    {Kind::blrelu, "blrelu", "Eq (56.1)", F::parametric, p_blrelu},
    {Kind::bif, "bif", "Eq (57)", F::parametric, p_bif},
    {Kind::bbif, "bbif", "Eq (59.1)", F::parametric, p_bbif},
    {Kind::reltanh, "reltanh", "Eq (60.1)", F::adaptive, p_reltanh},
    {Kind::plu, "plu", "Eq (61)", F::parametric, p_plu},
    {Kind::nlrelu, "nlrelu", "Eq (62.1)", F::parametric, p_nlrelu},
    {Kind::mtlu, "mtlu", "Eq (63)", F::adaptive, {}},
    {Kind::elu, "elu", "Eq (64.1)", F::parametric, p_elu},
    {Kind::selu, "selu", "Eq (65)", F::parametric, p_selu},
    {Kind::pelu, "pelu", "Eq (67.1)", F::adaptive, p_pelu},
    {Kind::celu, "celu", "Eq (68.1)", F::adaptive, p_celu},
    {Kind::mpelu, "mpelu", "Eq (70.1)", F::adaptive, p_mpelu},
    {Kind::reu, "reu", "Eq (71)", F::fixed, {}},
    {Kind::preu, "preu", "Eq (72.1)", F::adaptive, p_preu},
    {Kind::felu, "felu", "Eq (76.1)", F::adaptive, p_felu},
    {Kind::eelu, "eelu", "Eq (77)", F::stochastic, p_eelu},
    {Kind::pdelu, "pdelu", "Eq (79)", F::adaptive, p_pdelu},
    {Kind::elish, "elish", "Eq (80)", F::fixed, {}},
    {Kind::hard_elish, "hard_elish", "Eq (82)", F::fixed, {}},
    {Kind::swish, "swish", "Eq (83)", F::adaptive, p_swish},
    {Kind::eswish, "eswish", "Eq (85.1)", F::adaptive, p_eswish},
    {Kind::hard_swish_piecewise, "hard_swish_piecewise", "Eq (87)", F::fixed, {}},
    {Kind::hard_swish_beta, "hard_swish_beta", "Eq (87)", F::adaptive, p_hswish_beta},
    {Kind::softplus, "softplus", "Eq (88.1)", F::fixed, {}},
    {Kind::slu, "slu", "Eq (92)", F::parametric, p_slu},
    {Kind::mish, "mish", "Eq (93.1)", F::fixed, {}},
    {Kind::gelu_erf, "gelu_erf", "Eq (94.2)", F::fixed, {}},
    {Kind::gelu_tanh, "gelu_tanh", "Eq (95.1)", F::fixed, {}},
    {Kind::gelu_sigmoid, "gelu_sigmoid", "Eq (95.2)", F::fixed, {}},
    {Kind::sgelu, "sgelu", "Eq (96)", F::parametric, p_sgelu},
    {Kind::identity, "identity", "Eq (22)", F::fixed, {}},
};
static_assert(std::size(kind_table) == kind_count);

}  // namespace detail

inline const KindInfo& info(Kind k) {
  return detail::kind_table[static_cast<std::size_t>(k)];
}

inline std::string_view name(Kind k) { return info(k).name; }

inline std::optional<Kind> kind_from_name(std::string_view s) {
  for (const auto& ki : detail::kind_table)
    if (ki.name == s) return ki.kind;
  return std::nullopt;
}

inline std::array<Kind, kind_count> all_kinds() {
  std::array<Kind, kind_count> out{};
  for (std::size_t i = 0; i < kind_count; ++i) out[i] = static_cast<Kind>(i);
  return out;
}

inline bool is_stochastic(Kind k) { return info(k).family == Family::stochastic; }

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::fixed: return "fixed";
    case Family::parametric: return "parametric";
    case Family::adaptive: return "adaptive";
    case Family::stochastic: return "stochastic";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MTLU layout: K anchors c_0..c_{K-1} (hyper), then K+1 slopes a_0..a_K and
// K+1 intercepts b_0..b_K (learnable). Total 3K + 2 values.

namespace mtlu_layout {
inline std::size_t anchors(std::size_t n) { return (n - 2) / 3; }
inline std::size_t slope_index(std::size_t n, std::size_t k) { return anchors(n) + k; }
inline std::size_t intercept_index(std::size_t n, std::size_t k) { return 2 * anchors(n) + 1 + k; }
}  // namespace mtlu_layout

/// Values of one kind's parameters, positionally aligned with its schema.
struct ParamSet {
  Kind kind = Kind::identity;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

inline std::string param_name(Kind k, std::size_t n, std::size_t i) {
  if (k == Kind::mtlu) {
    const std::size_t K = mtlu_layout::anchors(n);
    if (i < K) return "c" + std::to_string(i);
    if (i < 2 * K + 1) return "a" + std::to_string(i - K);
    return "b" + std::to_string(i - 2 * K - 1);
  }
  return std::string(info(k).params[i].name);
}

inline Role param_role(Kind k, std::size_t n, std::size_t i) {
  if (k == Kind::mtlu) return i < mtlu_layout::anchors(n) ? Role::hyper : Role::learnable;
  return info(k).params[i].role;
}

inline std::vector<std::string> param_names(const ParamSet& p) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(param_name(p.kind, p.size(), i));
  return out;
}

inline std::optional<std::size_t> param_index(const ParamSet& p, std::string_view nm) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (param_name(p.kind, p.size(), i) == nm) return i;
  return std::nullopt;
}

/// Value by name; throws InvalidParameter for an unknown name.
inline double param(const ParamSet& p, std::string_view nm) {
  auto i = param_index(p, nm);
  if (!i) throw InvalidParameter(std::string(name(p.kind)) + ": no parameter named '" + std::string(nm) + "'");
  return p.values[*i];
}

inline void set_param(ParamSet& p, std::string_view nm, double v) {
  auto i = param_index(p, nm);
  if (!i) throw InvalidParameter(std::string(name(p.kind)) + ": no parameter named '" + std::string(nm) + "'");
  p.values[*i] = v;
}

inline std::vector<std::size_t> learnable_indices(const ParamSet& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (param_role(p.kind, p.size(), i) == Role::learnable) out.push_back(i);
  return out;
}

/// MTLU parameters with `anchors` uniformly spaced anchors starting at `c0`.
/// Slopes/intercepts default to ReLU on the bins (identity right of 0).
inline ParamSet mtlu_params(double c0, double width, std::size_t anchors) {
  if (anchors < 1) throw InvalidParameter("mtlu: at least one anchor required");
  ParamSet p{Kind::mtlu, std::vector<double>(3 * anchors + 2, 0.0)};
  for (std::size_t k = 0; k < anchors; ++k) p[k] = c0 + width * static_cast<double>(k);
  for (std::size_t k = 0; k <= anchors; ++k) {
    // bin k covers (c_{k-1}, c_k]; it lies on the positive side when c_{k-1} >= 0
    const bool positive = k > 0 && p[k - 1] >= 0.0;
    p[mtlu_layout::slope_index(p.size(), k)] = positive ? 1.0 : 0.0;
  }
  return p;
}

inline ParamSet default_params(Kind k) {
  if (k == Kind::mtlu) return mtlu_params(-1.0, 0.5, 5);
  ParamSet p{k, {}};
  for (const auto& s : info(k).params) p.values.push_back(s.default_value);
  return p;
}

namespace detail {
[[noreturn]] inline void invalid(Kind k, const std::string& what) {
  throw InvalidParameter(std::string(name(k)) + ": " + what);
}
}  // namespace detail

/// Throws InvalidParameter naming the violated invariant.
inline void validate(const ParamSet& p) {
  const Kind k = p.kind;
  if (k == Kind::mtlu) {
    if (p.size() < 5 || (p.size() - 2) % 3 != 0) detail::invalid(k, "parameter count must be 3K+2 with K >= 1");
  } else if (p.size() != info(k).params.size()) {
    detail::invalid(k, "expected " + std::to_string(info(k).params.size()) + " parameters, got " +
                           std::to_string(p.size()));
  }
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!std::isfinite(p[i])) detail::invalid(k, "parameter '" + param_name(k, p.size(), i) + "' is not finite");

  switch (k) {
    case Kind::psf:
      if (!(p[0] > 0)) detail::invalid(k, "m > 0 required");
      break;
    case Kind::ptanh:
      if (!(p[0] > 0 && p[0] < 1)) detail::invalid(k, "a in (0, 1) required");
      break;
    case Kind::hexpo:
      if (std::abs(p[1]) < 1e-9 || std::abs(p[3]) < 1e-9) detail::invalid(k, "|b| and |d| must be >= 1e-9");
      break;
    case Kind::srs:
      if (!(p[0] > 0 && p[1] > 0)) detail::invalid(k, "alpha > 0 and beta > 0 required");
      if (!(p[1] < p[0] * num::e - 1e-6)) detail::invalid(k, "beta must stay below the pole alpha*e (margin 1e-6)");
      break;
    case Kind::rrelu:
      if (!(0 <= p[0] && p[0] < p[1] && p[1] < 1)) detail::invalid(k, "0 <= l < u < 1 required");
      break;
    case Kind::ptelu:
      if (!(p[0] >= 0 && p[1] >= 0)) detail::invalid(k, "alpha >= 0 and beta >= 0 required");
      break;
    case Kind::rt_relu:
    case Kind::rt_prelu:
      if (!(p[0] >= 0)) detail::invalid(k, "sigma >= 0 required");
      break;
    case Kind::blu:
      if (!(p[0] >= -1 && p[0] <= 1)) detail::invalid(k, "beta in [-1, 1] required");
      break;
    case Kind::s_shaped_relu:
      if (!(p[2] <= p[0])) detail::invalid(k, "l <= r required");
      break;
    case Kind::erelu:
    case Kind::eprelu:
      if (!(p[0] > 0 && p[0] < 1)) detail::invalid(k, "alpha in (0, 1) required");
      break;
    case Kind::brelu:
    case Kind::blrelu:
      if (!(p[0] > 0)) detail::invalid(k, "A > 0 required");
      break;
    case Kind::bif:
      if (!(p[0] > 0)) detail::invalid(k, "a > 0 required");
      break;
    case Kind::bbif:
      if (!(p[0] > 0 && p[1] > 0)) detail::invalid(k, "a > 0 and b > 0 required");
      if (!(p[1] > p[0] / 2)) detail::invalid(k, "b > a/2 required");
      break;
    case Kind::reltanh:
      if (!(p[2] <= p[0] && p[0] <= p[3])) detail::invalid(k, "lambda_pos outside [lambda_pos_lower, lambda_pos_upper]");
      if (!(p[4] <= p[1] && p[1] <= p[5])) detail::invalid(k, "lambda_neg outside [lambda_neg_lower, lambda_neg_upper]");
      if (!(p[1] < p[0])) detail::invalid(k, "lambda_neg < lambda_pos required");
      break;
    case Kind::plu:
      if (!(p[1] > 0)) detail::invalid(k, "c > 0 required");
      break;
    case Kind::nlrelu:
      if (!(p[0] > 0)) detail::invalid(k, "beta > 0 required");
      break;
    case Kind::mtlu: {
      const std::size_t K = mtlu_layout::anchors(p.size());
      if (K >= 2) {
        const double w = p[1] - p[0];
        if (!(w > 0)) detail::invalid(k, "anchors must be strictly increasing");
        for (std::size_t i = 1; i < K; ++i) {
          const double wi = p[i] - p[i - 1];
          if (!(wi > 0)) detail::invalid(k, "anchors must be strictly increasing");
          if (std::abs(wi - w) > 1e-9 * std::max(1.0, std::abs(w))) detail::invalid(k, "anchors must be uniformly spaced");
        }
      }
      break;
    }
    case Kind::selu:
      if (!(p[0] > 0)) detail::invalid(k, "lambda > 0 required");
      break;
    case Kind::pelu:
      if (!(p[0] > 0 && p[1] > 0)) detail::invalid(k, "a > 0 and b > 0 required");
      break;
    case Kind::celu:
      if (!(p[0] > 0)) detail::invalid(k, "alpha > 0 required");
      break;
    case Kind::eelu:
      if (!(p[2] > 0 && p[2] <= 1)) detail::invalid(k, "epsilon in (0, 1] required");
      if (!(p[3] >= 0 && p[3] <= 2)) detail::invalid(k, "k in [0, 2] required");
      break;
    case Kind::pdelu:
      if (std::abs(p[1] - 1.0) < 1e-9) detail::invalid(k, "t != 1 required");
      break;
    default:
      break;
  }
}

}  // namespace actlib
