#pragma once

// Combined and learnable-shape activations: mixed, gated and hierarchical
// combiners, convex/affine hulls, APL, MeLU, LuTU, MoGU and BDAA.
//
// The kernels in namespace `composite` work on spans so the unit layer can
// evaluate straight out of a flat parameter vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "actlib/catalog.hpp"
#include "actlib/error.hpp"
#include "actlib/kinds.hpp"
#include "actlib/numeric.hpp"

namespace actlib {

namespace composite {

using detail::Pt;

inline constexpr double lrelu_slope = 0.01;
inline constexpr double elu_alpha = 1.0;

inline Pt lrelu(double x) { return x >= 0 ? Pt{x, 1} : Pt{lrelu_slope * x, lrelu_slope}; }
inline Pt elu(double x) { return x > 0 ? Pt{x, 1} : Pt{elu_alpha * std::expm1(x), elu_alpha * std::exp(x)}; }

inline Pt scalar(const ParamSet& p, double x) { return detail::core_at(p.kind, p.values.data(), p.size(), x, nullptr, 0.0, false); }

/// rho * LReLU + (1 - rho) * ELU.
inline Pt mixed(double rho, double x, double* drho) {
  const Pt l = lrelu(x), e = elu(x);
  if (drho) *drho = l.v - e.v;
  return {rho * l.v + (1 - rho) * e.v, rho * l.d + (1 - rho) * e.d};
}

/// tau * left + (1 - tau) * right with tau = logistic(omega * x).
inline Pt gate(double omega, Pt l, Pt r, double x, double* domega) {
  const double t = num::logistic(omega * x);
  const double g = t * (1 - t);
  if (domega) *domega = x * g * (l.v - r.v);
  return {t * l.v + (1 - t) * r.v, omega * g * (l.v - r.v) + t * l.d + (1 - t) * r.d};
}

inline Pt gated(double omega, double x, double* domega) { return gate(omega, lrelu(x), elu(x), x, domega); }

struct HierNode {
  ParamSet left = default_params(Kind::leaky_relu);
  ParamSet right = default_params(Kind::elu);
};

/// Max over gated middle nodes; ties go to the lowest index.
inline Pt hierarchical(std::span<const HierNode> nodes, std::span<const double> omega, double x,
                       std::span<double> domega, std::size_t* winner = nullptr) {
  Pt best{0, 0};
  double best_dw = 0;
  std::size_t bi = 0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    double dw = 0;
    const Pt v = gate(omega[m], scalar(nodes[m].left, x), scalar(nodes[m].right, x), x, &dw);
    if (m == 0 || v.v > best.v) {
      best = v;
      best_dw = dw;
      bi = m;
    }
  }
  if (!domega.empty()) {
    std::fill(domega.begin(), domega.end(), 0.0);
    domega[bi] = best_dw;
  }
  if (winner) *winner = bi;
  return best;
}

/// sum_i c_i phi_i(x) over base kinds with default parameters.
inline Pt hull(std::span<const Kind> bases, std::span<const double> c, double x, std::span<double> dc) {
  Pt out{0, 0};
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const ParamSet p = default_params(bases[i]);
    const Pt b = detail::core_at(bases[i], p.values.data(), p.size(), x, nullptr, 0.0, false);
    out.v += c[i] * b.v;
    out.d += c[i] * b.d;
    if (!dc.empty()) dc[i] = b.v;
  }
  return out;
}

/// max(0, x) + sum_s a_s max(0, -x + b_s).
inline Pt apl(std::span<const double> a, std::span<const double> b, double x, std::span<double> da,
              std::span<double> db) {
  Pt out = x >= 0 ? Pt{x, 1} : Pt{0, 0};
  for (std::size_t s = 0; s < a.size(); ++s) {
    const double h = b[s] - x;
    const bool on = h > 0;
    out.v += a[s] * (on ? h : 0);
    out.d -= on ? a[s] : 0;
    if (!da.empty()) da[s] = on ? h : 0;
    if (!db.empty()) db[s] = on ? a[s] : 0;
  }
  return out;
}

/// Hat function max(lambda - |x - a|, 0) with its x-derivative.
inline Pt hat(double a, double lambda, double x) {
  const double u = x - a;
  if (std::abs(u) >= lambda) return {0, 0};
  return {lambda - std::abs(u), u > 0 ? -1.0 : (u < 0 ? 1.0 : 0.0)};
}

/// PReLU(x) + sum_j c_j hat(a_j, lambda_j)(x).
inline Pt melu(double alpha, std::span<const double> c, std::span<const double> centers,
               std::span<const double> widths, double x, double* dalpha, std::span<double> dc) {
  Pt out = x >= 0 ? Pt{x, 1} : Pt{alpha * x, alpha};
  if (dalpha) *dalpha = x < 0 ? x : 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Pt h = hat(centers[j], widths[j], x);
    out.v += c[j] * h.v;
    out.d += c[j] * h.d;
    if (!dc.empty()) dc[j] = h.v;
  }
  return out;
}

/// Segment index for x on the grid x0 + s*i, clamped to the end segments.
inline std::size_t lutu_segment(double x0, double s, std::size_t n, double x) {
  const double f = std::floor((x - x0) / s);
  if (!(f > 0)) return 0;
  return std::min(static_cast<std::size_t>(f), n - 2);
}

/// Linear interpolation between anchors, extrapolated with the end slopes.
inline Pt lutu_interp(double x0, double s, std::span<const double> y, double x, std::span<double> dy,
                      std::size_t* seg = nullptr) {
  const std::size_t i = lutu_segment(x0, s, y.size(), x);
  const double xi = x0 + s * static_cast<double>(i), xi1 = xi + s;
  const double wi = (xi1 - x) / s, wi1 = (x - xi) / s;
  if (!dy.empty()) {
    std::fill(dy.begin(), dy.end(), 0.0);
    dy[i] = wi;
    dy[i + 1] = wi1;
  }
  if (seg) *seg = i;
  return {y[i] * wi + y[i + 1] * wi1, (y[i + 1] - y[i]) / s};
}

/// Raised-cosine mask with unit integral over [-tau, tau].
inline Pt cosine_mask(double u, double tau) {
  if (std::abs(u) > tau) return {0, 0};
  const double w = std::numbers::pi / tau;
  return {(1 + std::cos(w * u)) / (2 * tau), -w * std::sin(w * u) / (2 * tau)};
}

/// sum_i y_i r(x - x_i, t*s), visiting only masks whose support holds x.
inline Pt lutu_cosine(double x0, double s, double t, std::span<const double> y, double x, std::span<double> dy) {
  const double tau = t * s;
  if (!dy.empty()) std::fill(dy.begin(), dy.end(), 0.0);
  const double lo = std::ceil((x - tau - x0) / s), hi = std::floor((x + tau - x0) / s);
  Pt out{0, 0};
  const double last = static_cast<double>(y.size()) - 1;
  for (double fi = std::max(0.0, lo); fi <= std::min(hi, last); fi += 1) {
    const auto i = static_cast<std::size_t>(fi);
    const Pt r = cosine_mask(x - (x0 + s * fi), tau);
    out.v += y[i] * r.v;
    out.d += y[i] * r.d;
    if (!dy.empty()) dy[i] = r.v;
  }
  return out;
}

/// sum_i lambda_i N(x; mu_i, sigma_i).
inline Pt mogu(std::span<const double> lam, std::span<const double> mu, std::span<const double> sig, double x,
               std::span<double> dl, std::span<double> dm, std::span<double> ds) {
  Pt out{0, 0};
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double z = (x - mu[i]) / sig[i];
    const double g = std::exp(-0.5 * z * z) / (std::sqrt(2 * std::numbers::pi) * sig[i]);
    out.v += lam[i] * g;
    out.d -= lam[i] * g * z / sig[i];
    if (!dl.empty()) dl[i] = g;
    if (!dm.empty()) dm[i] = lam[i] * g * z / sig[i];
    if (!ds.empty()) ds[i] = lam[i] * g * (z * z - 1) / sig[i];
  }
  return out;
}

inline Pt bdaa(int variant, double a, double x, double* da) {
  using num::logistic;
  auto dl = [](double u) {
    const double s = num::logistic(u);
    return s * (1 - s);
  };
  switch (variant) {
    case 1:
    case 2: {
      if (da) *da = 0.5 * dl(x + a);
      const double v = 0.5 * (logistic(x) + logistic(x + a));
      return {variant == 1 ? v : v - 0.5, 0.5 * (dl(x) + dl(x + a))};
    }
    case 3:
    case 4: {
      if (da) *da = 0.5 * (dl(x + a) - dl(x - a));
      const double v = 0.5 * (logistic(x + a) + logistic(x - a));
      return {variant == 3 ? v : v - 0.5, 0.5 * (dl(x + a) + dl(x - a))};
    }
    default:
      throw InvalidParameter("bdaa: variant must be 1, 2, 3 or 4");
  }
}

}  // namespace composite

// ---------------------------------------------------------------------------
// Typed parameter records and the checked entry points.

inline double mixed_eval(double rho, double x) {
  if (!(rho >= 0 && rho <= 1)) throw InvalidParameter("mixed: rho in [0, 1] required");
  return composite::mixed(rho, x, nullptr).v;
}

inline double gated_eval(double omega, double x) {
  if (!std::isfinite(omega)) throw InvalidParameter("gated: omega must be finite");
  return composite::gated(omega, x, nullptr).v;
}

struct HierarchicalSpec {
  std::vector<composite::HierNode> nodes;
  std::vector<double> omega;
};

inline void validate(const HierarchicalSpec& s) {
  if (s.nodes.empty()) throw InvalidParameter("hierarchical: at least one middle node required");
  if (s.omega.size() != s.nodes.size()) throw InvalidParameter("hierarchical: one omega per middle node required");
  for (const auto& n : s.nodes) {
    validate(n.left);
    validate(n.right);
  }
}

inline double hierarchical_eval(const HierarchicalSpec& s, double x) {
  validate(s);
  return composite::hierarchical(s.nodes, s.omega, x, {}).v;
}

struct HullSpec {
  bool convex = true;
  std::vector<Kind> bases{Kind::identity, Kind::relu};
  std::vector<double> c{0.5, 0.5};
};

inline void validate(const HullSpec& s) {
  const char* nm = s.convex ? "hull_convex" : "hull_affine";
  if (s.bases.empty() || s.c.size() != s.bases.size())
    throw InvalidParameter(std::string(nm) + ": one coefficient per base required");
  double sum = 0;
  for (double c : s.c) {
    if (s.convex && c < 0) throw InvalidParameter(std::string(nm) + ": coefficients must be >= 0");
    sum += c;
  }
  if (std::abs(sum - 1) > 1e-9) throw InvalidParameter(std::string(nm) + ": coefficients must sum to 1");
}

inline double hull_combine(const HullSpec& s, double x) {
  validate(s);
  return composite::hull(s.bases, s.c, x, {}).v;
}

struct APLParams {
  std::vector<double> a{0.0, 0.0};
  std::vector<double> b{-1.0, 1.0};
};

struct APLGrad {
  double d_dx;
  std::vector<double> d_da, d_db;
};

inline void validate(const APLParams& p) {
  if (p.a.empty() || p.a.size() != p.b.size()) throw InvalidParameter("apl: S >= 1 hinges with one a and one b each");
}

inline double apl_eval(const APLParams& p, double x) {
  validate(p);
  return composite::apl(p.a, p.b, x, {}, {}).v;
}

inline APLGrad apl_grad(const APLParams& p, double x) {
  validate(p);
  APLGrad g{0, std::vector<double>(p.a.size()), std::vector<double>(p.a.size())};
  g.d_dx = composite::apl(p.a, p.b, x, g.d_da, g.d_db).d;
  return g;
}

struct MeLUParams {
  double alpha = 0.25;
  std::vector<double> c;
  std::vector<double> centers;
  std::vector<double> widths;

  /// Equally spaced centers over [-range, range] sharing one width.
  static MeLUParams equally_spaced(std::size_t hats, double range, double width, double alpha = 0.25) {
    MeLUParams p;
    p.alpha = alpha;
    for (std::size_t j = 0; j < hats; ++j) {
      p.centers.push_back(hats == 1 ? 0.0 : -range + 2 * range * static_cast<double>(j) / static_cast<double>(hats - 1));
      p.widths.push_back(width);
      p.c.push_back(0.0);
    }
    return p;
  }
};

inline void validate(const MeLUParams& p) {
  if (p.c.size() != p.centers.size() || p.c.size() != p.widths.size())
    throw InvalidParameter("melu: one coefficient, center and width per hat required");
  for (double w : p.widths)
    if (!(w > 0)) throw InvalidParameter("melu: widths must be > 0");
}

inline double melu_eval(const MeLUParams& p, double x) {
  validate(p);
  return composite::melu(p.alpha, p.c, p.centers, p.widths, x, nullptr, {}).v;
}

enum class LuTUMode { interp, cosine };

struct LuTUParams {
  double x0 = -3.0;
  double s = 0.5;
  std::vector<double> y;
  double t = 2.0;
  LuTUMode mode = LuTUMode::interp;

  double anchor(std::size_t i) const { return x0 + s * static_cast<double>(i); }

  /// Anchors sampled from a catalog kind; in cosine mode the samples are
  /// scaled by s so the overlapping masks sum to the sampled function.
  static LuTUParams sampled(Kind k, double x0, double s, std::size_t n, LuTUMode mode, double t = 2.0) {
    LuTUParams p{x0, s, {}, t, mode};
    for (std::size_t i = 0; i < n; ++i) p.y.push_back(eval(k, p.anchor(i)) * (mode == LuTUMode::cosine ? s : 1.0));
    return p;
  }
};

struct LuTUGrad {
  std::size_t segment;
  double d_dyi, d_dyi1, d_dx;
};

inline void validate(const LuTUParams& p) {
  if (p.y.size() < 2) throw InvalidParameter("lutu: at least 2 anchors required");
  if (!(p.s > 0)) throw InvalidParameter("lutu: step s > 0 required");
  if (!(p.t > 0)) throw InvalidParameter("lutu: smoothing ratio t > 0 required");
}

inline double lutu_eval(const LuTUParams& p, double x) {
  validate(p);
  if (p.mode == LuTUMode::interp) return composite::lutu_interp(p.x0, p.s, p.y, x, {}).v;
  return composite::lutu_cosine(p.x0, p.s, p.t, p.y, x, {}).v;
}

/// Interp-mode partials for the segment holding x.
inline LuTUGrad lutu_grads(const LuTUParams& p, double x) {
  validate(p);
  std::vector<double> dy(p.y.size());
  std::size_t i = 0;
  const auto r = composite::lutu_interp(p.x0, p.s, p.y, x, dy, &i);
  return {i, dy[i], dy[i + 1], r.d};
}

struct MoGUParams {
  std::vector<double> lambda{1.0, 1.0};
  std::vector<double> mu{-1.0, 1.0};
  std::vector<double> sigma{1.0, 1.0};
};

inline void validate(const MoGUParams& p) {
  if (p.lambda.empty() || p.mu.size() != p.lambda.size() || p.sigma.size() != p.lambda.size())
    throw InvalidParameter("mogu: one lambda, mu and sigma per component required");
  for (double s : p.sigma)
    if (!(s > 0)) throw InvalidParameter("mogu: sigma must be > 0");
}

inline double mogu_eval(const MoGUParams& p, double x) {
  validate(p);
  return composite::mogu(p.lambda, p.mu, p.sigma, x, {}, {}, {}).v;
}

struct BDAAParams {
  int variant = 1;
  double a = 2.0;
};

struct BDAAGrad {
  double d_dx, d_da;
};

inline void validate(const BDAAParams& p) {
  if (p.variant < 1 || p.variant > 4) throw InvalidParameter("bdaa: variant must be 1, 2, 3 or 4");
  if (p.variant >= 3 && !(p.a >= 0)) throw InvalidParameter("bdaa: a >= 0 required for variants 3 and 4");
}

inline double bdaa_eval(const BDAAParams& p, double x) {
  validate(p);
  return composite::bdaa(p.variant, p.a, x, nullptr).v;
}

inline BDAAGrad bdaa_grads(const BDAAParams& p, double x) {
  validate(p);
  double da = 0;
  const auto r = composite::bdaa(p.variant, p.a, x, &da);
  return {r.d, da};
}

}  // namespace actlib
