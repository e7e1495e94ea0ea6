#pragma once

// A Unit is any scalar activation the network can host: a catalog kind or
// one of the composites. Its numbers live in one flat vector so optimizers,
// checkpoints and the gradient checker treat every unit alike.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "actlib/catalog.hpp"
#include "actlib/composite.hpp"
#include "actlib/gradients.hpp"
#include "actlib/kinds.hpp"
#include "actlib/stochastic.hpp"

namespace actlib {

enum class UnitType {
  scalar, mixed, gated, hierarchical, hull_convex, hull_affine, apl, melu, lutu_interp, lutu_cosine, mogu, bdaa,
};

class Unit {
public:
  Unit() : Unit(default_params(Kind::identity)) {}
  explicit Unit(ParamSet p) : type_(UnitType::scalar), kind_(p.kind), params_(std::move(p.values)) {}

  static Unit scalar(ParamSet p) { return Unit(std::move(p)); }
  static Unit scalar(Kind k) { return Unit(default_params(k)); }
  static Unit mixed(double rho = 0.5) { return make(UnitType::mixed, {rho}); }
  static Unit gated(double omega = 1.0) { return make(UnitType::gated, {omega}); }
  static Unit hierarchical(HierarchicalSpec s) {
    Unit u = make(UnitType::hierarchical, s.omega);
    u.nodes_ = std::move(s.nodes);
    return u;
  }
  static Unit hull(HullSpec s) {
    Unit u = make(s.convex ? UnitType::hull_convex : UnitType::hull_affine, s.c);
    u.bases_ = std::move(s.bases);
    return u;
  }
  static Unit apl(const APLParams& p) {
    std::vector<double> v = p.a;
    v.insert(v.end(), p.b.begin(), p.b.end());
    return make(UnitType::apl, std::move(v));
  }
  static Unit melu(const MeLUParams& p) {
    std::vector<double> v{p.alpha};
    v.insert(v.end(), p.c.begin(), p.c.end());
    Unit u = make(UnitType::melu, std::move(v));
    u.centers_ = p.centers;
    u.widths_ = p.widths;
    return u;
  }
  static Unit lutu(const LuTUParams& p) {
    Unit u = make(p.mode == LuTUMode::interp ? UnitType::lutu_interp : UnitType::lutu_cosine, p.y);
    u.x0_ = p.x0;
    u.step_ = p.s;
    u.ratio_ = p.t;
    return u;
  }
  static Unit mogu(const MoGUParams& p) {
    std::vector<double> v = p.lambda;
    v.insert(v.end(), p.mu.begin(), p.mu.end());
    v.insert(v.end(), p.sigma.begin(), p.sigma.end());
    return make(UnitType::mogu, std::move(v));
  }
  static Unit bdaa(const BDAAParams& p) {
    Unit u = make(UnitType::bdaa, {p.a});
    u.variant_ = p.variant;
    return u;
  }

  /// Default unit for a CLI/JSON name: any catalog kind or a composite name.
  static std::optional<Unit> from_name(std::string_view nm) {
    if (auto k = kind_from_name(nm)) return scalar(*k);
    if (nm == "mixed") return mixed();
    if (nm == "gated") return gated();
    if (nm == "hierarchical") return hierarchical({{{}, {}}, {1.0, -1.0}});
    if (nm == "hull_convex") return hull({true, {Kind::identity, Kind::relu}, {0.5, 0.5}});
    if (nm == "hull_affine") return hull({false, {Kind::identity, Kind::tanh}, {0.5, 0.5}});
    if (nm == "apl") return apl({});
    if (nm == "melu") return melu(MeLUParams::equally_spaced(9, 4.0, 0.5));
    if (nm == "lutu_interp") return lutu(LuTUParams::sampled(Kind::relu, -3.0, 0.5, 13, LuTUMode::interp));
    if (nm == "lutu_cosine") return lutu(LuTUParams::sampled(Kind::relu, -3.0, 0.5, 13, LuTUMode::cosine));
    if (nm == "mogu") return mogu({});
    for (int v = 1; v <= 4; ++v)
      if (nm == "bdaa" + std::to_string(v)) return bdaa({v, 2.0});
    return std::nullopt;
  }

  static std::vector<std::string> composite_names() {
    return {"mixed", "gated", "hierarchical", "hull_convex", "hull_affine", "apl", "melu",
            "lutu_interp", "lutu_cosine", "mogu", "bdaa1", "bdaa2", "bdaa3", "bdaa4"};
  }

  UnitType type() const { return type_; }
  Kind kind() const { return kind_; }
  bool is_scalar() const { return type_ == UnitType::scalar; }

  std::string name() const {
    switch (type_) {
      case UnitType::scalar: return std::string(actlib::name(kind_));
      case UnitType::mixed: return "mixed";
      case UnitType::gated: return "gated";
      case UnitType::hierarchical: return "hierarchical";
      case UnitType::hull_convex: return "hull_convex";
      case UnitType::hull_affine: return "hull_affine";
      case UnitType::apl: return "apl";
      case UnitType::melu: return "melu";
      case UnitType::lutu_interp: return "lutu_interp";
      case UnitType::lutu_cosine: return "lutu_cosine";
      case UnitType::mogu: return "mogu";
      case UnitType::bdaa: return "bdaa" + std::to_string(variant_);
    }
    return "?";
  }

  ParamSet param_set() const { return ParamSet{kind_, params_}; }

  std::span<const double> params() const { return params_; }
  /// Writable view for optimizers; the caller re-validates afterwards.
  std::span<double> mutable_params() { return params_; }
  std::size_t size() const { return params_.size(); }

  void assign(std::span<const double> v) {
    if (v.size() != params_.size())
      throw ShapeMismatch(name() + ": expected " + std::to_string(params_.size()) + " parameters, got " +
                          std::to_string(v.size()));
    std::copy(v.begin(), v.end(), params_.begin());
  }

  std::vector<std::string> param_names() const {
    std::vector<std::string> out;
    const std::size_t n = params_.size();
    auto seq = [&](const char* base, std::size_t count, std::size_t from = 1) {
      for (std::size_t i = 0; i < count; ++i) out.push_back(base + std::to_string(i + from));
    };
    switch (type_) {
      case UnitType::scalar: return actlib::param_names(param_set());
      case UnitType::mixed: return {"rho"};
      case UnitType::gated: return {"omega"};
      case UnitType::hierarchical: seq("omega", n); break;
      case UnitType::hull_convex:
      case UnitType::hull_affine:
        for (Kind k : bases_) out.push_back("c_" + std::string(actlib::name(k)));
        break;
      case UnitType::apl: seq("a", n / 2); seq("b", n / 2); break;
      case UnitType::melu: out.push_back("alpha"); seq("c", n - 1); break;
      case UnitType::lutu_interp:
      case UnitType::lutu_cosine: seq("y", n, 0); break;
      case UnitType::mogu: seq("lambda", n / 3); seq("mu", n / 3); seq("sigma", n / 3); break;
      case UnitType::bdaa: return {"a"};
    }
    return out;
  }

  /// Sets one parameter by name; call validate() once all are set.
  void set_param(std::string_view nm, double v) {
    const auto names = param_names();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == nm) {
        params_[i] = v;
        return;
      }
    throw InvalidParameter(name() + ": no parameter named '" + std::string(nm) + "'");
  }

  std::vector<Role> roles() const {
    std::vector<Role> out;
    for (std::size_t i = 0; i < params_.size(); ++i)
      out.push_back(is_scalar() ? param_role(kind_, params_.size(), i) : Role::learnable);
    return out;
  }

  bool stochastic() const { return is_scalar() && is_stochastic(kind_); }
  std::optional<std::size_t> sampled_slot() const {
    return stochastic() ? sampled_index(kind_) : std::nullopt;
  }

  void validate() const { validate(params_); }

  void validate(std::span<const double> p) const {
    switch (type_) {
      case UnitType::scalar: actlib::validate(ParamSet{kind_, {p.begin(), p.end()}}); break;
      case UnitType::mixed:
        if (!(p[0] >= 0 && p[0] <= 1)) throw InvalidParameter("mixed: rho in [0, 1] required");
        break;
      case UnitType::gated:
        if (!std::isfinite(p[0])) throw InvalidParameter("gated: omega must be finite");
        break;
      case UnitType::hierarchical: actlib::validate(HierarchicalSpec{nodes_, {p.begin(), p.end()}}); break;
      case UnitType::hull_convex:
      case UnitType::hull_affine:
        actlib::validate(HullSpec{type_ == UnitType::hull_convex, bases_, {p.begin(), p.end()}});
        break;
      case UnitType::apl:
        if (p.empty() || p.size() % 2) throw InvalidParameter("apl: S >= 1 hinges with one a and one b each");
        break;
      case UnitType::melu:
        actlib::validate(MeLUParams{p[0], {p.begin() + 1, p.end()}, centers_, widths_});
        break;
      case UnitType::lutu_interp:
      case UnitType::lutu_cosine: actlib::validate(lutu_params(p)); break;
      case UnitType::mogu: {
        const std::size_t m = p.size() / 3;
        if (m == 0 || p.size() % 3) throw InvalidParameter("mogu: one lambda, mu and sigma per component required");
        actlib::validate(MoGUParams{{p.begin(), p.begin() + m}, {p.begin() + m, p.begin() + 2 * m},
                                    {p.begin() + 2 * m, p.end()}});
        break;
      }
      case UnitType::bdaa: actlib::validate(BDAAParams{variant_, p[0]}); break;
    }
    if (!num::all_finite(p)) throw InvalidParameter(name() + ": parameters must be finite");
  }

  /// Value at x with explicit flat parameters (no validation, no sampling).
  double value(std::span<const double> p, double x) const { return eval_pt(p, x, {}, 0.0).v; }
  double value(double x) const { return value(params_, x); }

  /// d/dx at x; dp (empty or size() long) receives parameter partials,
  /// zero for non-learnable entries.
  double grad(std::span<const double> p, double x, std::span<double> dp, double subgradient = 0.0) const {
    return eval_pt(p, x, dp, subgradient).d;
  }

  /// Value and d/dx together.
  detail::Pt eval_pt(std::span<const double> p, double x, std::span<double> dp, double subgradient) const {
    const std::size_t n = p.size();
    switch (type_) {
      case UnitType::scalar: {
        const auto r = detail::core_at(kind_, p.data(), n, x, dp.empty() ? nullptr : dp.data(), subgradient, false);
        if (!dp.empty())
          for (std::size_t i = 0; i < n; ++i)
            if (param_role(kind_, n, i) != Role::learnable) dp[i] = 0;
        return r;
      }
      case UnitType::mixed: return composite::mixed(p[0], x, dp.empty() ? nullptr : &dp[0]);
      case UnitType::gated: return composite::gated(p[0], x, dp.empty() ? nullptr : &dp[0]);
      case UnitType::hierarchical: return composite::hierarchical(nodes_, p, x, dp);
      case UnitType::hull_convex:
      case UnitType::hull_affine: return composite::hull(bases_, p, x, dp);
      case UnitType::apl: {
        const std::size_t s = n / 2;
        return composite::apl(p.first(s), p.subspan(s), x, dp.empty() ? dp : dp.first(s),
                              dp.empty() ? dp : dp.subspan(s));
      }
      case UnitType::melu:
        return composite::melu(p[0], p.subspan(1), centers_, widths_, x, dp.empty() ? nullptr : &dp[0],
                               dp.empty() ? dp : dp.subspan(1));
      case UnitType::lutu_interp: return composite::lutu_interp(x0_, step_, p, x, dp);
      case UnitType::lutu_cosine: return composite::lutu_cosine(x0_, step_, ratio_, p, x, dp);
      case UnitType::mogu: {
        const std::size_t m = n / 3;
        auto part = [&](std::size_t i) { return dp.empty() ? dp : dp.subspan(i * m, m); };
        return composite::mogu(p.first(m), p.subspan(m, m), p.subspan(2 * m), x, part(0), part(1), part(2));
      }
      case UnitType::bdaa: return composite::bdaa(variant_, p[0], x, dp.empty() ? nullptr : &dp[0]);
    }
    return {0, 0};
  }

  /// Points in [lo, hi] where the unit switches branch. Argmax switches of
  /// the hierarchical combiner are located numerically.
  std::vector<double> breakpoints(double lo, double hi) const {
    std::vector<double> out;
    auto add_kind = [&](const ParamSet& ps) {
      for (double b : actlib::breakpoints(ps)) out.push_back(b);
    };
    switch (type_) {
      case UnitType::scalar: add_kind(param_set()); break;
      case UnitType::mixed:
      case UnitType::gated: out.push_back(0.0); break;
      case UnitType::hierarchical: {
        for (const auto& nd : nodes_) {
          add_kind(nd.left);
          add_kind(nd.right);
        }
        auto winner = [&](double x) {
          std::size_t w = 0;
          composite::hierarchical(nodes_, params_, x, {}, &w);
          return w;
        };
        const int steps = 20000;
        std::size_t prev = winner(lo);
        double xp = lo;
        for (int i = 1; i <= steps; ++i) {
          const double x = lo + (hi - lo) * i / steps;
          const std::size_t w = winner(x);
          if (w != prev) {
            double a = xp, b = x;
            for (int it = 0; it < 60; ++it) {
              const double m = 0.5 * (a + b);
              (winner(m) == prev ? a : b) = m;
            }
            out.push_back(0.5 * (a + b));
            prev = w;
          }
          xp = x;
        }
        break;
      }
      case UnitType::hull_convex:
      case UnitType::hull_affine:
        for (Kind k : bases_) add_kind(default_params(k));
        break;
      case UnitType::apl:
        out.push_back(0.0);
        for (std::size_t s = params_.size() / 2; s < params_.size(); ++s) out.push_back(params_[s]);
        break;
      case UnitType::melu:
        out.push_back(0.0);
        for (std::size_t j = 0; j < centers_.size(); ++j) {
          out.push_back(centers_[j] - widths_[j]);
          out.push_back(centers_[j]);
          out.push_back(centers_[j] + widths_[j]);
        }
        break;
      case UnitType::lutu_interp:
        for (std::size_t i = 1; i + 1 < params_.size(); ++i) out.push_back(x0_ + step_ * static_cast<double>(i));
        break;
      case UnitType::lutu_cosine:
        for (std::size_t i = 0; i < params_.size(); ++i) {
          const double xi = x0_ + step_ * static_cast<double>(i);
          out.push_back(xi - ratio_ * step_);
          out.push_back(xi + ratio_ * step_);
        }
        break;
      case UnitType::mogu:
      case UnitType::bdaa: break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Checkable checkable(double lo = -5, double hi = 5) const {
    if (is_scalar()) return actlib::checkable(param_set());
    Checkable c;
    c.label = name();
    c.params = params_;
    c.names = param_names();
    c.learnable.assign(params_.size(), true);
    const Unit self = *this;
    c.value = [self](std::span<const double> q, double x) { return self.value(q, x); };
    c.grad = [self](std::span<const double> q, double x, std::span<double> dp) { return self.grad(q, x, dp); };
    c.breakpoints = breakpoints(lo - 1, hi + 1);
    return c;
  }

  /// Deterministic perturbation `which`, projected back onto the hull
  /// constraints where those apply.
  Unit perturbed(int which) const {
    Unit u = *this;
    if (is_scalar()) {
      u.params_ = perturbed_params(param_set(), which).values;
      return u;
    }
    const auto rs = roles();
    auto project = [&](std::vector<double>& v) {
      if (type_ == UnitType::hull_convex) {
        double s = 0;
        for (double& c : v) s += c = std::max(c, 0.0);
        for (double& c : v) c /= s;
      } else if (type_ == UnitType::hull_affine) {
        double s = 0;
        for (double c : v) s += c;
        for (double& c : v) c += (1 - s) / static_cast<double>(v.size());
      }
    };
    u.params_ = perturb_values(params_, rs, which, [&](std::vector<double>& v) {
      project(v);
      try {
        validate(v);
        return true;
      } catch (const InvalidParameter&) {
        return false;
      }
    });
    return u;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["type"] = name();
    j["params"] = params_;
    j["param_names"] = param_names();
    switch (type_) {
      case UnitType::hierarchical: {
        auto nodes = nlohmann::json::array();
        for (const auto& nd : nodes_)
          nodes.push_back({{"left", {{"kind", actlib::name(nd.left.kind)}, {"params", nd.left.values}}},
                           {"right", {{"kind", actlib::name(nd.right.kind)}, {"params", nd.right.values}}}});
        j["nodes"] = nodes;
        break;
      }
      case UnitType::hull_convex:
      case UnitType::hull_affine: {
        auto b = nlohmann::json::array();
        for (Kind k : bases_) b.push_back(actlib::name(k));
        j["bases"] = b;
        break;
      }
      case UnitType::melu:
        j["centers"] = centers_;
        j["widths"] = widths_;
        break;
      case UnitType::lutu_interp:
      case UnitType::lutu_cosine:
        j["x0"] = x0_;
        j["step"] = step_;
        j["ratio"] = ratio_;
        break;
      default: break;
    }
    return j;
  }

  static Unit from_json(const nlohmann::json& j) {
    const std::string t = j.at("type").get<std::string>();
    auto base = from_name(t);
    if (!base) throw InvalidParameter("unknown unit type '" + t + "'");
    Unit u = *base;
    auto kind_of = [](const nlohmann::json& s) {
      auto k = kind_from_name(s.get<std::string>());
      if (!k) throw InvalidParameter("unknown kind '" + s.get<std::string>() + "'");
      return *k;
    };
    if (j.contains("nodes")) {
      u.nodes_.clear();
      for (const auto& nd : j["nodes"])
        u.nodes_.push_back({ParamSet{kind_of(nd["left"]["kind"]), nd["left"]["params"].get<std::vector<double>>()},
                            ParamSet{kind_of(nd["right"]["kind"]), nd["right"]["params"].get<std::vector<double>>()}});
    }
    if (j.contains("bases")) {
      u.bases_.clear();
      for (const auto& b : j["bases"]) u.bases_.push_back(kind_of(b));
    }
    if (j.contains("centers")) u.centers_ = j["centers"].get<std::vector<double>>();
    if (j.contains("widths")) u.widths_ = j["widths"].get<std::vector<double>>();
    if (j.contains("x0")) u.x0_ = j["x0"].get<double>();
    if (j.contains("step")) u.step_ = j["step"].get<double>();
    if (j.contains("ratio")) u.ratio_ = j["ratio"].get<double>();
    u.params_ = j.at("params").get<std::vector<double>>();
    u.validate();
    return u;
  }

private:
  static Unit make(UnitType t, std::vector<double> p) {
    Unit u;
    u.type_ = t;
    u.params_ = std::move(p);
    return u;
  }

  LuTUParams lutu_params(std::span<const double> p) const {
    return {x0_, step_, {p.begin(), p.end()}, ratio_,
            type_ == UnitType::lutu_interp ? LuTUMode::interp : LuTUMode::cosine};
  }

  UnitType type_ = UnitType::scalar;
  Kind kind_ = Kind::identity;
  std::vector<double> params_;
  std::vector<composite::HierNode> nodes_;
  std::vector<Kind> bases_;
  std::vector<double> centers_, widths_;
  double x0_ = 0, step_ = 1, ratio_ = 2;
  int variant_ = 1;
};

/// Every name the CLI accepts: catalog kinds first, then composites.
inline std::vector<std::string> unit_names() {
  std::vector<std::string> out;
  for (Kind k : all_kinds()) out.emplace_back(name(k));
  for (auto& c : Unit::composite_names()) out.push_back(c);
  return out;
}

}  // namespace actlib
