#pragma once

// Regression and disk-classification training runs, decision grids, output
// landscapes of untrained networks and their roughness.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actlib/io.hpp"
#include "actlib/netlab.hpp"
#include "actlib/unit.hpp"

namespace actlib {

struct RegressionConfig {
  double noise = 0.15;
  double lo = -3.0, hi = 3.0, step = 0.01;
  std::vector<std::size_t> hidden{10, 10, 10};
  Optimizer optimizer = Optimizer::adam;
  double lr = 0.01;
  std::size_t batch = 64;
  int rounds = 50;
  std::uint64_t seed = 42;
  double train_fraction = 0.8;
};

struct ClassificationConfig {
  std::size_t points = 1000;
  double radius = 0.5;
  std::vector<std::size_t> hidden{5, 5};
  Optimizer optimizer = Optimizer::adam;
  double lr = 0.01;
  std::size_t batch = 64;
  int rounds = 50;
  std::uint64_t seed = 42;
  double train_fraction = 0.8;
  std::size_t grid = 200;
};

struct LandscapeConfig {
  std::size_t resolution = 200;
  std::size_t width = 16;
  std::size_t depth = 3;
  double lo = -2.0, hi = 2.0;
};

/// y = exp(-x^2) + N(0, noise) on the lattice lo, lo + step, ..., hi.
inline Dataset gen_regression_data(const RegressionConfig& cfg) {
  if (!(cfg.step > 0 && cfg.hi > cfg.lo)) throw InvalidParameter("regression: lo < hi and step > 0 required");
  const auto n = static_cast<std::size_t>(std::llround((cfg.hi - cfg.lo) / cfg.step)) + 1;
  // integer lattice divided by 1/step keeps x = -3.00, -2.99, ... exact to rounding
  const double inv = 1.0 / cfg.step;
  const double first = std::round(cfg.lo * inv);
  Rng rng(cfg.seed, 0);
  Dataset d{Matrix(n, 1), Matrix(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::abs(inv - std::round(inv)) < 1e-9 ? (first + static_cast<double>(i)) / std::round(inv)
                                                             : cfg.lo + cfg.step * static_cast<double>(i);
    d.x(i, 0) = x;
    d.y(i, 0) = std::exp(-x * x) + rng.normal(0.0, cfg.noise);
  }
  return d;
}

/// Area-uniform points in the unit disk; label 1 inside `radius`.
inline Dataset gen_disk_data(const ClassificationConfig& cfg) {
  Rng rng(cfg.seed, 0);
  Dataset d{Matrix(cfg.points, 2), Matrix(cfg.points, 1)};
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double r = std::sqrt(rng.uniform(0.0, 1.0));
    const double t = 2 * std::numbers::pi * rng.uniform(0.0, 1.0);
    d.x(i, 0) = r * std::cos(t);
    d.x(i, 1) = r * std::sin(t);
    d.y(i, 0) = std::hypot(d.x(i, 0), d.x(i, 1)) < cfg.radius ? 1.0 : 0.0;
  }
  return d;
}

struct DivergenceInfo {
  std::string what;
  int round = 0, batch = 0;
};

struct RegressionResult {
  Network net;
  MetricLog log;
  std::size_t train_size = 0, val_size = 0;
  std::optional<DivergenceInfo> diverged;

  double final_val_loss() const { return log.rounds.empty() ? NAN : log.rounds.back().val_loss; }
};

/// Predicted labels over a res x res lattice on [-1, 1]^2, row-major in x2.
struct DecisionGrid {
  std::size_t resolution = 0;
  std::vector<double> coord;
  std::vector<int> label;  // label[j * res + i] at (coord[i], coord[j])

  /// Share of lattice points inside the unit disk predicted as class 1.
  double class1_fraction() const {
    std::size_t in = 0, one = 0;
    for (std::size_t j = 0; j < resolution; ++j)
      for (std::size_t i = 0; i < resolution; ++i)
        if (std::hypot(coord[i], coord[j]) <= 1.0) {
          ++in;
          one += label[j * resolution + i] == 1;
        }
    return in ? static_cast<double>(one) / static_cast<double>(in) : 0.0;
  }
};

struct ClassificationResult {
  Network net;
  MetricLog log;
  std::size_t train_size = 0, val_size = 0;
  Confusion confusion;
  DecisionGrid grid;
  std::optional<DivergenceInfo> diverged;

  double final_accuracy() const { return confusion.accuracy(); }
};

inline std::vector<double> lattice(double lo, double hi, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i)
    c[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return c;
}

inline DecisionGrid decision_grid(const Network& net, std::size_t res) {
  if (res < 2) throw InvalidParameter("decision_grid: resolution >= 2 required");
  DecisionGrid g{res, lattice(-1, 1, res), {}};
  Matrix x(res * res, 2);
  for (std::size_t j = 0; j < res; ++j)
    for (std::size_t i = 0; i < res; ++i) {
      x(j * res + i, 0) = g.coord[i];
      x(j * res + i, 1) = g.coord[j];
    }
  const Matrix p = predict(net, x);
  for (double v : p.data) g.label.push_back(v > 0.5 ? 1 : 0);
  return g;
}

inline std::vector<std::size_t> layer_widths(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

inline RegressionResult run_regression(const Unit& act, const RegressionConfig& cfg) {
  act.validate();
  const auto [train, val] = split(gen_regression_data(cfg), cfg.train_fraction, cfg.seed);
  RegressionResult r{init_glorot(layer_widths(1, cfg.hidden, 1), cfg.seed, act), {}, train.size(), val.size(), {}};
  TrainConfig tc{LossKind::mse, cfg.optimizer, cfg.lr, cfg.batch, cfg.rounds, cfg.seed};
  try {
    fit(r.net, train, val, tc, r.log);
  } catch (const Divergence& e) {
    r.diverged = DivergenceInfo{e.what(), e.round(), e.batch()};
  }
  return r;
}

inline RegressionResult run_regression(Kind k, const ParamSet& p, const RegressionConfig& cfg) {
  if (p.kind != k) throw InvalidParameter("run_regression: parameter set belongs to another kind");
  return run_regression(Unit(p), cfg);
}

inline ClassificationResult run_classification(const Unit& act, const ClassificationConfig& cfg) {
  act.validate();
  const auto [train, val] = split(gen_disk_data(cfg), cfg.train_fraction, cfg.seed);
  ClassificationResult r;
  r.net = init_glorot(layer_widths(2, cfg.hidden, 1), cfg.seed, act, Decoder::sigmoid);
  r.train_size = train.size();
  r.val_size = val.size();
  TrainConfig tc{LossKind::bce, cfg.optimizer, cfg.lr, cfg.batch, cfg.rounds, cfg.seed};
  try {
    fit(r.net, train, val, tc, r.log);
  } catch (const Divergence& e) {
    r.diverged = DivergenceInfo{e.what(), e.round(), e.batch()};
    return r;
  }
  r.confusion = confusion(predict(r.net, val.x), val.y);
  r.grid = decision_grid(r.net, cfg.grid);
  return r;
}

inline ClassificationResult run_classification(Kind k, const ParamSet& p, const ClassificationConfig& cfg) {
  if (p.kind != k) throw InvalidParameter("run_classification: parameter set belongs to another kind");
  return run_classification(Unit(p), cfg);
}

// ---------------------------------------------------------------------------
// Output landscapes

struct Grid {
  std::size_t n = 0;
  double lo = 0, hi = 1;
  std::vector<double> v;  // v[j * n + i] at (x_i, y_j)

  double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i, std::size_t j) const { return v[j * n + i]; }
};

/// Scalar output of an untrained Glorot network over [lo, hi]^2.
inline Grid output_landscape(const Unit& act, const LandscapeConfig& cfg, std::uint64_t seed) {
  if (cfg.resolution < 16) throw InvalidParameter("output_landscape: resolution >= 16 required");
  act.validate();
  std::vector<std::size_t> widths{2};
  for (std::size_t i = 0; i < cfg.depth; ++i) widths.push_back(cfg.width);
  widths.push_back(1);
  const Network net = init_glorot(widths, seed, act);
  const auto c = lattice(cfg.lo, cfg.hi, cfg.resolution);
  const std::size_t n = cfg.resolution;
  Matrix x(n * n, 2);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      x(j * n + i, 0) = c[i];
      x(j * n + i, 1) = c[j];
    }
  return {n, cfg.lo, cfg.hi, predict(net, x).data};
}

inline Grid output_landscape(Kind k, const ParamSet& p, const LandscapeConfig& cfg, std::uint64_t seed) {
  if (p.kind != k) throw InvalidParameter("output_landscape: parameter set belongs to another kind");
  return output_landscape(Unit(p), cfg, seed);
}

/// Mean |five-point Laplacian| / h^2 over interior points.
inline double roughness(const Grid& g) {
  if (g.n < 3 || g.v.size() != g.n * g.n) throw InvalidParameter("roughness: grid of at least 3x3 required");
  const double h = g.spacing();
  double s = 0;
  for (std::size_t j = 1; j + 1 < g.n; ++j)
    for (std::size_t i = 1; i + 1 < g.n; ++i)
      s += std::abs(g.at(i + 1, j) + g.at(i - 1, j) + g.at(i, j + 1) + g.at(i, j - 1) - 4 * g.at(i, j));
  return s / (h * h) / static_cast<double>((g.n - 2) * (g.n - 2));
}

// ---------------------------------------------------------------------------
// Output files

inline io::Table metrics_table(const MetricLog& log) {
  io::Table t;
  const std::size_t nl = log.rounds.empty() ? 0 : log.rounds.front().grad_rms.size();
  const bool cls = !log.rounds.empty() && log.rounds.front().accuracy.has_value();
  t.header = {"round", "loss", "val_loss"};
  if (cls) t.header.push_back("val_accuracy");
  for (std::size_t l = 0; l < nl; ++l) t.header.push_back("grad_rms_" + std::to_string(l + 1));
  for (std::size_t l = 0; l < nl; ++l) t.header.push_back("weight_rms_" + std::to_string(l + 1));
  for (const auto& r : log.rounds) {
    std::vector<double> row{static_cast<double>(r.round), r.loss, r.val_loss};
    if (cls) row.push_back(r.accuracy.value_or(NAN));
    row.insert(row.end(), r.grad_rms.begin(), r.grad_rms.end());
    row.insert(row.end(), r.weight_rms.begin(), r.weight_rms.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline io::Table confusion_table(const Confusion& c) {
  return {{"actual", "predicted_0", "predicted_1"},
          {{0, static_cast<double>(c.tn), static_cast<double>(c.fp)},
           {1, static_cast<double>(c.fn), static_cast<double>(c.tp)}}};
}

inline io::Table boundary_table(const DecisionGrid& g) {
  io::Table t{{"x1", "x2", "label"}, {}};
  for (std::size_t j = 0; j < g.resolution; ++j)
    for (std::size_t i = 0; i < g.resolution; ++i)
      t.rows.push_back({g.coord[i], g.coord[j], static_cast<double>(g.label[j * g.resolution + i])});
  return t;
}

inline io::Table landscape_table(const Grid& g) {
  io::Table t{{"x", "y", "value"}, {}};
  const auto c = lattice(g.lo, g.hi, g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) t.rows.push_back({c[i], c[j], g.at(i, j)});
  return t;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json divergence_json(const std::optional<DivergenceInfo>& d) {
  if (!d) return {{"status", "complete"}};
  return {{"status", "diverged"}, {"partial", true}, {"error", d->what}, {"round", d->round}, {"batch", d->batch}};
}

inline nlohmann::json config_json(const RegressionConfig& c, const Unit& act) {
  return {{"task", "regression"},
          {"activation", act.to_json()},
          {"target", "exp(-x^2)"},
          {"noise", c.noise},
          {"x_range", {c.lo, c.hi}},
          {"x_step", c.step},
          {"hidden", c.hidden},
          {"output", "linear"},
          {"loss", "mse"},
          {"optimizer", c.optimizer == Optimizer::adam ? "adam" : "sgd"},
          {"learning_rate", c.lr},
          {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
          {"batch", c.batch},
          {"rounds", c.rounds},
          {"seed", c.seed},
          {"train_fraction", c.train_fraction}};
}

inline nlohmann::json config_json(const ClassificationConfig& c, const Unit& act) {
  return {{"task", "classification"},
          {"activation", act.to_json()},
          {"points", c.points},
          {"radius", c.radius},
          {"hidden", c.hidden},
          {"output", "sigmoid+threshold"},
          {"loss", "bce"},
          {"optimizer", c.optimizer == Optimizer::adam ? "adam" : "sgd"},
          {"learning_rate", c.lr},
          {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
          {"batch", c.batch},
          {"rounds", c.rounds},
          {"seed", c.seed},
          {"train_fraction", c.train_fraction},
          {"grid", c.grid}};
}

inline void write_run(const std::filesystem::path& dir, const RegressionConfig& cfg, const Unit& act,
                      const RegressionResult& r) {
  std::filesystem::create_directories(dir);
  auto conf = config_json(cfg, act);
  conf.update(divergence_json(r.diverged));
  conf["train_size"] = r.train_size;
  conf["val_size"] = r.val_size;
  io::write_file((dir / "config.json").string(), dump_json(conf));
  io::write_file((dir / "metrics.json").string(), dump_json(r.log.to_json()));
  io::write_file((dir / "metrics.csv").string(), io::to_csv(metrics_table(r.log)));
}

inline void write_run(const std::filesystem::path& dir, const ClassificationConfig& cfg, const Unit& act,
                      const ClassificationResult& r) {
  std::filesystem::create_directories(dir);
  auto conf = config_json(cfg, act);
  conf.update(divergence_json(r.diverged));
  conf["train_size"] = r.train_size;
  conf["val_size"] = r.val_size;
  io::write_file((dir / "config.json").string(), dump_json(conf));
  io::write_file((dir / "metrics.json").string(), dump_json(r.log.to_json()));
  io::write_file((dir / "metrics.csv").string(), io::to_csv(metrics_table(r.log)));
  if (!r.diverged) {
    io::write_file((dir / "confusion.csv").string(), io::to_csv(confusion_table(r.confusion)));
    io::write_file((dir / "boundary.csv").string(), io::to_csv(boundary_table(r.grid)));
  }
}

}  // namespace actlib
