#pragma once

// Random streams, evaluation context and the sampling rules of the
// stochastic activations.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "actlib/error.hpp"
#include "actlib/kinds.hpp"
#include "actlib/numeric.hpp"

namespace actlib {

/// Deterministic random stream. Streams with the same (root, stream) pair
/// produce identical sequences; different stream indices are independent.
class Rng {
public:
  explicit Rng(std::uint64_t root = 0, std::uint64_t stream = 0) { reseed(root, stream); }

  void reseed(std::uint64_t root, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal(double mean, double sd) {
    if (!(sd > 0)) return mean;
    return std::normal_distribution<double>(mean, sd)(eng_);
  }
  std::uint64_t next() { return eng_(); }
  std::mt19937_64& engine() noexcept { return eng_; }

private:
  std::mt19937_64 eng_;
};

enum class Mode { train, eval };

/// How often a stochastic coefficient is redrawn in train mode.
enum class SampleScope { per_call, per_batch };

/// Not shareable across threads: each worker owns its context.
struct EvalContext {
  Mode mode = Mode::eval;
  SampleScope scope = SampleScope::per_batch;
  Rng rng{};
  /// Weight in [0, 1] placed on the steeper side at an exact kink.
  double subgradient = 0.0;
  /// Throw KinkProximity when a derivative is requested within 1e-9 of a kink.
  bool strict_kinks = false;
  /// Coefficient shared by every call until next_batch() (per-batch scope).
  std::optional<double> batch_draw;

  void next_batch() { batch_draw.reset(); }

  static EvalContext eval_mode() { return {}; }
  static EvalContext train_mode(std::uint64_t seed, std::uint64_t stream = 0) {
    EvalContext c;
    c.mode = Mode::train;
    c.rng.reseed(seed, stream);
    return c;
  }
};

/// r ~ U(l, u) for the randomized leaky slope.
inline double sample_rrelu_slope(double l, double u, Rng& rng) {
  if (!(0 <= l && l < u && u < 1)) throw InvalidParameter("rrelu: 0 <= l < u < 1 required");
  return rng.uniform(l, u);
}

inline double clamp_eelu_k(double s) noexcept { return std::max(0.0, std::min(s, 2.0)); }

/// sigma ~ U(0, epsilon), s ~ N(1, sigma), k = clamp(s, 0, 2).
inline double sample_eelu_k(double epsilon, Rng& rng) {
  if (!(epsilon > 0 && epsilon <= 1)) throw InvalidParameter("eelu: epsilon in (0, 1] required");
  const double sigma = rng.uniform(0.0, epsilon);
  return clamp_eelu_k(rng.normal(1.0, sigma));
}

/// Offset a ~ N(0, sigma) for the randomly translated units.
inline double sample_rt_offset(double sigma, Rng& rng) {
  if (!(sigma >= 0)) throw InvalidParameter("rt_relu: sigma >= 0 required");
  return rng.normal(0.0, sigma);
}

/// Slope R ~ U(1 - alpha, 1 + alpha).
inline double sample_erelu_slope(double alpha, Rng& rng) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidParameter("erelu: alpha in (0, 1) required");
  return rng.uniform(1.0 - alpha, 1.0 + alpha);
}

/// Position of the sampled coefficient in the kind's ParamSet, if any.
inline std::optional<std::size_t> sampled_index(Kind k) {
  const auto ps = info(k).params;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].role == Role::sampled) return i;
  return std::nullopt;
}

/// Draws a fresh value for the kind's sampled coefficient.
inline double sample_coefficient(const ParamSet& p, Rng& rng) {
  switch (p.kind) {
    case Kind::rrelu: return sample_rrelu_slope(p[0], p[1], rng);
    case Kind::rt_relu:
    case Kind::rt_prelu: return sample_rt_offset(p[0], rng);
    case Kind::erelu:
    case Kind::eprelu: return sample_erelu_slope(p[0], rng);
    case Kind::eelu: return sample_eelu_k(p[2], rng);
    default: throw InvalidParameter(std::string(name(p.kind)) + ": not a stochastic kind");
  }
}

/// Expected value of the sampled coefficient, used in eval mode.
inline double expected_coefficient(const ParamSet& p) {
  switch (p.kind) {
    case Kind::rrelu: return 0.5 * (p[0] + p[1]);
    case Kind::rt_relu:
    case Kind::rt_prelu: return 0.0;
    case Kind::erelu:
    case Kind::eprelu: return 1.0;
    // clamp of N(1, sigma) to [0, 2] is symmetric about 1
    case Kind::eelu: return 1.0;
    default: throw InvalidParameter(std::string(name(p.kind)) + ": not a stochastic kind");
  }
}

/// Replaces the sampled coefficient by its expectation.
inline ParamSet eval_mode_params(Kind k, const ParamSet& p) {
  if (p.kind != k) throw InvalidParameter(std::string(name(k)) + ": parameter set belongs to " + std::string(name(p.kind)));
  if (!is_stochastic(k)) throw InvalidParameter(std::string(name(k)) + ": not a stochastic kind");
  ParamSet out = p;
  out[*sampled_index(k)] = expected_coefficient(p);
  return out;
}

inline ParamSet eval_mode_params(const ParamSet& p) { return eval_mode_params(p.kind, p); }

/// P(N(1, sigma) < 0) = Phi(-1/sigma).
inline double neg_prob(double sigma) {
  if (!(sigma > 0)) throw InvalidParameter("neg_prob: sigma > 0 required");
  return num::gaussian_cdf(-1.0 / sigma);
}

}  // namespace actlib
