#pragma once

// Small dense network with per-layer activation units, MSE/BCE losses,
// SGD and Adam, gradient/weight RMS telemetry and a binary checkpoint.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actlib/error.hpp"
#include "actlib/matrix.hpp"
#include "actlib/numeric.hpp"
#include "actlib/stochastic.hpp"
#include "actlib/unit.hpp"

namespace actlib {

enum class Decoder { linear, sigmoid };

struct Layer {
  std::size_t in = 0, out = 0;
  Matrix w;  // out x in
  std::vector<double> b;
  Unit act;
};

class Network {
public:
  std::vector<Layer> layers;
  Decoder decoder = Decoder::linear;
  /// Learnable activation parameters are updated by the optimizers.
  bool train_activations = true;

  std::size_t input_width() const { return layers.front().in; }
  std::size_t output_width() const { return layers.back().out; }
  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w{input_width()};
    for (const auto& l : layers) w.push_back(l.out);
    return w;
  }

  /// Bumped on every parameter change; caches remember the value they saw.
  std::uint64_t version() const { return version_; }
  void touch() { ++version_; }

  /// Parameter blocks in a fixed order: W, b, activation params per layer.
  std::vector<std::span<double>> blocks() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
      out.emplace_back(l.w.data);
      out.emplace_back(l.b);
      out.emplace_back(act_store(l));
    }
    return out;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto s : blocks()) n += s.size();
    return n;
  }

  bool all_finite() {
    for (auto s : blocks())
      if (!num::all_finite(std::span<const double>(s))) return false;
    return true;
  }

  /// Mutable view of a layer's activation parameters.
  static std::span<double> act_store(Layer& l) { return l.act.mutable_params(); }

private:
  std::uint64_t version_ = 0;
};

/// W ~ U(-r, r) with r = sqrt(6 / (fan_in + fan_out)); zero biases. The
/// last layer is linear; `act` is shared by every hidden layer.
inline Network init_glorot(const std::vector<std::size_t>& widths, std::uint64_t seed, const Unit& act = Unit(),
                           Decoder decoder = Decoder::linear) {
  if (widths.size() < 2) throw InvalidParameter("init_glorot: at least two widths required");
  for (auto w : widths)
    if (w == 0) throw InvalidParameter("init_glorot: widths must be positive");
  Rng rng(seed, 2);
  Network net;
  net.decoder = decoder;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer l;
    l.in = widths[i];
    l.out = widths[i + 1];
    l.w = Matrix(l.out, l.in);
    const double r = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (double& v : l.w.data) v = rng.uniform(-r, r);
    l.b.assign(l.out, 0.0);
    l.act = i + 2 < widths.size() ? act : Unit();
    net.layers.push_back(std::move(l));
  }
  return net;
}

struct LayerCache {
  Matrix input;  // batch x in
  Matrix z;      // batch x out
  /// Sampled coefficient per (row, neuron) when drawn per call, otherwise a
  /// single entry shared by the layer; empty for deterministic units.
  std::vector<double> draws;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Matrix output;
  std::uint64_t version = 0;
  const Network* net = nullptr;
};

namespace detail {

inline std::vector<double> act_params(const Layer& l, const std::vector<double>& draws, std::size_t idx) {
  std::vector<double> p(l.act.params().begin(), l.act.params().end());
  if (!draws.empty()) p[*l.act.sampled_slot()] = draws[draws.size() == 1 ? 0 : idx];
  return p;
}

}  // namespace detail

inline ForwardCache forward(const Network& net, const Matrix& x, EvalContext& ctx) {
  if (x.cols != net.input_width())
    throw ShapeMismatch("forward: batch has " + std::to_string(x.cols) + " features, network expects " +
                        std::to_string(net.input_width()));
  ForwardCache c;
  c.net = &net;
  c.version = net.version();
  Matrix a = x;
  for (const Layer& l : net.layers) {
    LayerCache lc;
    lc.input = a;
    lc.z = Matrix(x.rows, l.out);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t j = 0; j < l.out; ++j) {
        double s = l.b[j];
        for (std::size_t k = 0; k < l.in; ++k) s += l.w(j, k) * a(r, k);
        lc.z(r, j) = s;
      }
    if (l.act.stochastic()) {
      const ParamSet ps = l.act.param_set();
      if (ctx.mode == Mode::eval)
        lc.draws = {expected_coefficient(ps)};
      else if (ctx.scope == SampleScope::per_batch)
        lc.draws = {sample_coefficient(ps, ctx.rng)};
      else
        for (std::size_t i = 0; i < x.rows * l.out; ++i) lc.draws.push_back(sample_coefficient(ps, ctx.rng));
    }
    Matrix next(x.rows, l.out);
    std::vector<double> p = detail::act_params(l, lc.draws, 0);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t j = 0; j < l.out; ++j) {
        if (lc.draws.size() > 1) p = detail::act_params(l, lc.draws, r * l.out + j);
        next(r, j) = l.act.value(p, lc.z(r, j));
      }
    a = std::move(next);
    c.layers.push_back(std::move(lc));
  }
  if (net.decoder == Decoder::sigmoid)
    for (double& v : a.data) v = num::logistic(v);
  c.output = std::move(a);
  return c;
}

inline Matrix predict(const Network& net, const Matrix& x) {
  EvalContext ctx;
  return forward(net, x, ctx).output;
}

struct LayerGrad {
  Matrix dw;
  std::vector<double> db;
  std::vector<double> dact;
};

using Gradients = std::vector<LayerGrad>;

/// Reverse pass for d(loss)/d(output) given as a batch x out matrix.
inline Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& loss_grad) {
  if (cache.net != &net || cache.version != net.version() || cache.layers.size() != net.layers.size())
    throw StaleCache("backward: cache does not belong to the current network parameters");
  require_shape(loss_grad, cache.output.rows, cache.output.cols, "backward: loss gradient");
  const std::size_t n = loss_grad.rows;
  Matrix up = loss_grad;
  if (net.decoder == Decoder::sigmoid)
    for (std::size_t i = 0; i < up.size(); ++i) up.data[i] *= cache.output.data[i] * (1 - cache.output.data[i]);

  Gradients g(net.layers.size());
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Layer& l = net.layers[li];
    const LayerCache& lc = cache.layers[li];
    LayerGrad& lg = g[li];
    lg.dw = Matrix(l.out, l.in);
    lg.db.assign(l.out, 0.0);
    lg.dact.assign(l.act.size(), 0.0);
    std::vector<double> dp(l.act.size());
    std::vector<double> p = detail::act_params(l, lc.draws, 0);
    Matrix dz(n, l.out);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < l.out; ++j) {
        if (lc.draws.size() > 1) p = detail::act_params(l, lc.draws, r * l.out + j);
        std::fill(dp.begin(), dp.end(), 0.0);
        const double d = l.act.grad(p, lc.z(r, j), dp);
        const double u = up(r, j);
        dz(r, j) = u * d;
        for (std::size_t q = 0; q < dp.size(); ++q) lg.dact[q] += u * dp[q];
      }
    if (auto s = l.act.sampled_slot()) lg.dact[*s] = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < l.out; ++j) {
        const double v = dz(r, j);
        lg.db[j] += v;
        for (std::size_t k = 0; k < l.in; ++k) lg.dw(j, k) += v * lc.input(r, k);
      }
    if (li > 0) {
      Matrix prev(n, l.in);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < l.in; ++k) {
          double s = 0;
          for (std::size_t j = 0; j < l.out; ++j) s += dz(r, j) * l.w(j, k);
          prev(r, k) = s;
        }
      up = std::move(prev);
    }
  }
  return g;
}

inline std::vector<std::span<double>> blocks(Gradients& g) {
  std::vector<std::span<double>> out;
  for (auto& l : g) {
    out.emplace_back(l.dw.data);
    out.emplace_back(l.db);
    out.emplace_back(l.dact);
  }
  return out;
}

struct Loss {
  double value = 0;
  Matrix grad;
};

inline Loss mse_loss(const Matrix& pred, const Matrix& target) {
  require_shape(target, pred.rows, pred.cols, "mse_loss: target");
  Loss l{0, Matrix(pred.rows, pred.cols)};
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred.data[i] - target.data[i];
    l.value += e * e / n;
    l.grad.data[i] = 2 * e / n;
  }
  return l;
}

inline constexpr double prob_clamp = 1e-12;

inline Loss bce_loss(const Matrix& prob, const Matrix& label) {
  require_shape(label, prob.rows, prob.cols, "bce_loss: label");
  Loss l{0, Matrix(prob.rows, prob.cols)};
  const double n = static_cast<double>(prob.size());
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = std::clamp(prob.data[i], prob_clamp, 1 - prob_clamp);
    const double y = label.data[i];
    l.value -= (y * std::log(p) + (1 - y) * std::log(1 - p)) / n;
    l.grad.data[i] = (p - y) / (p * (1 - p)) / n;
  }
  return l;
}

inline double rms(std::span<const double> v) {
  if (v.empty()) throw InvalidParameter("rms: empty input");
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

namespace detail {

/// Keeps a layer's activation parameters valid after an update: hulls are
/// projected back onto their constraint, anything else still invalid reverts.
inline void settle_activation(Layer& l, const std::vector<double>& before) {
  auto p = Network::act_store(l);
  if (l.act.type() == UnitType::hull_convex) {
    double s = 0;
    for (double& c : p) s += c = std::max(c, 0.0);
    if (s > 0)
      for (double& c : p) c /= s;
  } else if (l.act.type() == UnitType::hull_affine) {
    double s = 0;
    for (double c : p) s += c;
    for (double& c : p) c += (1 - s) / static_cast<double>(p.size());
  }
  try {
    l.act.validate();
  } catch (const InvalidParameter&) {
    std::copy(before.begin(), before.end(), p.begin());
  }
}

template <class Update>
void apply_update(Network& net, Gradients& g, Update&& upd) {
  auto pb = net.blocks();
  auto gb = blocks(g);
  if (pb.size() != gb.size()) throw ShapeMismatch("optimizer: gradient set does not match network");
  for (std::size_t i = 0; i < pb.size(); ++i)
    if (pb[i].size() != gb[i].size()) throw ShapeMismatch("optimizer: gradient block size mismatch");
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    Layer& l = net.layers[li];
    const std::vector<double> before(l.act.params().begin(), l.act.params().end());
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t bi = 3 * li + k;
      if (k == 2 && !net.train_activations) continue;
      upd(bi, pb[bi], std::span<const double>(gb[bi]));
    }
    if (net.train_activations && l.act.size()) settle_activation(l, before);
  }
  net.touch();
}

}  // namespace detail

inline void sgd_step(Network& net, Gradients& g, double lr) {
  if (!(lr > 0)) throw InvalidParameter("sgd_step: learning rate must be > 0");
  detail::apply_update(net, g, [&](std::size_t, std::span<double> p, std::span<const double> d) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * d[i];
  });
}

struct AdamState {
  double lr = 0.01, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m, v;

  AdamState() = default;
  AdamState(Network& net, double lr_, double b1 = 0.9, double b2 = 0.999, double e = 1e-8)
      : lr(lr_), beta1(b1), beta2(b2), eps(e) {
    for (auto s : net.blocks()) {
      m.emplace_back(s.size(), 0.0);
      v.emplace_back(s.size(), 0.0);
    }
  }
};

inline void adam_step(Network& net, Gradients& g, AdamState& st) {
  if (st.m.size() != 3 * net.layers.size()) throw ShapeMismatch("adam_step: state does not match network");
  ++st.step;
  const double c1 = 1 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1 - std::pow(st.beta2, static_cast<double>(st.step));
  detail::apply_update(net, g, [&](std::size_t bi, std::span<double> p, std::span<const double> d) {
    auto& m = st.m[bi];
    auto& v = st.v[bi];
    if (m.size() != p.size()) throw ShapeMismatch("adam_step: moment shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = st.beta1 * m[i] + (1 - st.beta1) * d[i];
      v[i] = st.beta2 * v[i] + (1 - st.beta2) * d[i] * d[i];
      p[i] -= st.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + st.eps);
    }
  });
}

// ---------------------------------------------------------------------------
// Telemetry

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }
};

struct RoundRecord {
  int round = 0;
  double loss = 0;
  double val_loss = 0;
  std::vector<double> grad_rms;
  std::vector<double> weight_rms;
  std::vector<std::vector<double>> act_params;
  std::optional<double> accuracy;
  std::optional<Confusion> confusion;
};

struct MetricLog {
  struct Batch {
    int round = 0, batch = 0;
    double loss = 0;
    std::vector<double> grad_rms;
  };
  std::vector<Batch> batches;
  std::vector<RoundRecord> rounds;

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto& bj = j["batches"] = nlohmann::json::array();
    for (const auto& b : batches)
      bj.push_back({{"round", b.round}, {"batch", b.batch}, {"loss", b.loss}, {"grad_rms", b.grad_rms}});
    auto& rj = j["rounds"] = nlohmann::json::array();
    for (const auto& r : rounds) {
      nlohmann::json e{{"round", r.round},           {"loss", r.loss},
                       {"val_loss", r.val_loss},     {"grad_rms", r.grad_rms},
                       {"weight_rms", r.weight_rms}, {"activation_params", r.act_params}};
      if (r.accuracy) e["val_accuracy"] = *r.accuracy;
      if (r.confusion)
        e["confusion"] = {{"tp", r.confusion->tp}, {"fp", r.confusion->fp}, {"tn", r.confusion->tn},
                          {"fn", r.confusion->fn}};
      rj.push_back(std::move(e));
    }
    return j;
  }
};

// ---------------------------------------------------------------------------
// Training loop

struct Dataset {
  Matrix x, y;
  std::size_t size() const { return x.rows; }
};

inline Dataset subset(const Dataset& d, std::span<const std::size_t> idx) {
  Dataset s{Matrix(idx.size(), d.x.cols), Matrix(idx.size(), d.y.cols)};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(d.x.row(idx[i]), d.x.cols, s.x.row(i));
    std::copy_n(d.y.row(idx[i]), d.y.cols, s.y.row(i));
  }
  return s;
}

/// Seeded shuffle split; the first floor(train_fraction * n) go to training.
inline std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, 1);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const auto nt = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(d.size())));
  return {subset(d, std::span(idx).first(nt)), subset(d, std::span(idx).subspan(nt))};
}

enum class LossKind { mse, bce };
enum class Optimizer { adam, sgd };

struct TrainConfig {
  LossKind loss = LossKind::mse;
  Optimizer optimizer = Optimizer::adam;
  double lr = 0.01;
  std::size_t batch = 64;
  int rounds = 50;
  std::uint64_t seed = 42;
  SampleScope scope = SampleScope::per_batch;
};

inline Loss compute_loss(LossKind k, const Matrix& out, const Matrix& y) {
  return k == LossKind::mse ? mse_loss(out, y) : bce_loss(out, y);
}

inline Confusion confusion(const Matrix& prob, const Matrix& label) {
  Confusion c;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const bool p = prob.data[i] > 0.5, y = label.data[i] > 0.5;
    (p ? (y ? c.tp : c.fp) : (y ? c.fn : c.tn))++;
  }
  return c;
}

inline double layer_rms(const Matrix& w, const std::vector<double>& b) {
  std::vector<double> all = w.data;
  all.insert(all.end(), b.begin(), b.end());
  return rms(all);
}

/// Trains in place, appending to `log` as it goes so a Divergence leaves the
/// completed records behind.
inline void fit(Network& net, const Dataset& train, const Dataset& val, const TrainConfig& cfg, MetricLog& log) {
  if (cfg.batch == 0) throw InvalidParameter("fit: batch size must be > 0");
  if (train.size() == 0) throw InvalidParameter("fit: empty training set");
  Rng order(cfg.seed, 3);
  EvalContext ctx = EvalContext::train_mode(cfg.seed, 4);
  ctx.scope = cfg.scope;
  AdamState adam(net, cfg.lr);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t nl = net.layers.size();

  for (int round = 1; round <= cfg.rounds; ++round) {
    std::shuffle(idx.begin(), idx.end(), order.engine());
    RoundRecord rec;
    rec.round = round;
    rec.grad_rms.assign(nl, 0.0);
    int nb = 0;
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch, ++nb) {
      const auto take = std::min(cfg.batch, idx.size() - start);
      const Dataset b = subset(train, std::span(idx).subspan(start, take));
      ctx.next_batch();
      const ForwardCache cache = forward(net, b.x, ctx);
      const Loss loss = compute_loss(cfg.loss, cache.output, b.y);
      if (!std::isfinite(loss.value)) throw Divergence("non-finite training loss", round, nb);
      Gradients g = backward(net, cache, loss.grad);
      MetricLog::Batch br{round, nb, loss.value, {}};
      for (std::size_t l = 0; l < nl; ++l) {
        br.grad_rms.push_back(layer_rms(g[l].dw, g[l].db));
        rec.grad_rms[l] += br.grad_rms.back();
      }
      rec.loss += loss.value;
      log.batches.push_back(std::move(br));
      if (cfg.optimizer == Optimizer::adam)
        adam_step(net, g, adam);
      else
        sgd_step(net, g, cfg.lr);
      if (!net.all_finite()) throw Divergence("non-finite parameter after update", round, nb);
    }
    rec.loss /= nb;
    for (double& v : rec.grad_rms) v /= nb;
    for (const auto& l : net.layers) {
      rec.weight_rms.push_back(layer_rms(l.w, l.b));
      rec.act_params.emplace_back(l.act.params().begin(), l.act.params().end());
    }
    if (val.size()) {
      const Matrix out = predict(net, val.x);
      rec.val_loss = compute_loss(cfg.loss, out, val.y).value;
      if (!std::isfinite(rec.val_loss)) throw Divergence("non-finite validation loss", round, nb);
      if (cfg.loss == LossKind::bce) {
        rec.confusion = confusion(out, val.y);
        rec.accuracy = rec.confusion->accuracy();
      }
    }
    log.rounds.push_back(std::move(rec));
  }
}

// ---------------------------------------------------------------------------
// Checkpoint: one JSON header line, then every parameter block as
// little-endian IEEE-754 doubles in blocks() order.

inline void save_checkpoint(Network& net, std::ostream& os, std::uint64_t seed = 0) {
  nlohmann::json h;
  h["format"] = "actlib-net-1";
  h["widths"] = net.widths();
  h["decoder"] = net.decoder == Decoder::linear ? "linear" : "sigmoid";
  h["seed"] = seed;
  auto& acts = h["activations"] = nlohmann::json::array();
  for (const auto& l : net.layers) acts.push_back(l.act.to_json());
  h["parameter_count"] = net.parameter_count();
  os << h.dump() << '\n';
  for (auto s : net.blocks())
    for (double v : s) {
      auto u = std::bit_cast<std::uint64_t>(v);
      char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
      os.write(bytes, 8);
    }
}

inline Network load_checkpoint(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("checkpoint: missing header");
  const auto h = nlohmann::json::parse(line);
  const auto widths = h.at("widths").get<std::vector<std::size_t>>();
  Network net = init_glorot(widths, 0, Unit(), h.at("decoder") == "sigmoid" ? Decoder::sigmoid : Decoder::linear);
  const auto& acts = h.at("activations");
  if (acts.size() != net.layers.size()) throw ShapeMismatch("checkpoint: activation count mismatch");
  for (std::size_t i = 0; i < net.layers.size(); ++i) net.layers[i].act = Unit::from_json(acts[i]);
  if (h.at("parameter_count").get<std::size_t>() != net.parameter_count())
    throw ShapeMismatch("checkpoint: parameter count mismatch");
  for (auto s : net.blocks())
    for (double& v : s) {
      unsigned char bytes[8];
      if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error("checkpoint: truncated parameter blob");
      std::uint64_t u = 0;
      for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
      v = std::bit_cast<double>(u);
    }
  net.touch();
  return net;
}

}  // namespace actlib
