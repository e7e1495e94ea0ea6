// actlib command-line front end.
//
// Exit codes: 0 success, 1 check failure, 2 usage, 3 training divergence.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "actlib/catalog.hpp"
#include "actlib/experiments.hpp"
#include "actlib/gradients.hpp"
#include "actlib/io.hpp"
#include "actlib/unit.hpp"

using namespace actlib;
using nlohmann::json;

namespace {

/// Bad command-line input; reported on one line with exit code 2.
struct Usage : std::runtime_error {
  Usage(const std::string& flag, const std::string& msg) : std::runtime_error(flag + ": " + msg) {}
};

struct CheckFailed {};

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Unit resolve_unit(const std::string& fn, const std::vector<std::string>& params) {
  auto u = Unit::from_name(fn);
  if (!u) throw Usage("--fn", "unknown function '" + fn + "' (see `actlib props --list`)");
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Usage("--param", "expected name=value, got '" + kv + "'");
    const auto v = parse_double(std::string_view(kv).substr(eq + 1));
    if (!v) throw Usage("--param", "'" + kv.substr(eq + 1) + "' is not a number");
    try {
      u->set_param(kv.substr(0, eq), *v);
    } catch (const InvalidParameter& e) {
      throw Usage("--param", e.what());
    }
  }
  try {
    u->validate();
  } catch (const InvalidParameter& e) {
    throw Usage("--param", e.what());
  }
  return *u;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("AF_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
      throw Usage("AF_SEED", "'" + std::string(s) + "' is not a non-negative integer");
    return v;
  }
  return 42;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    io::write_file(out, text);
}

struct Point {
  double value, d_dx;
};

/// Value and d/dx of a unit; catalog kinds honour train/eval mode.
Point evaluate(const Unit& u, double x, EvalContext& ctx) {
  if (!std::isfinite(x)) throw Usage("--x", "input must be finite");
  if (u.is_scalar()) {
    const auto g = grad(u.kind(), u.param_set(), x, ctx);
    return {g.value, g.d_dx};
  }
  std::vector<double> dp(u.size());
  const auto r = u.eval_pt(u.params(), x, dp, ctx.subgradient);
  return {r.v, r.d};
}

EvalContext make_context(const std::string& mode, std::uint64_t seed, double subgradient) {
  EvalContext ctx = mode == "train" ? EvalContext::train_mode(seed) : EvalContext::eval_mode();
  ctx.scope = SampleScope::per_call;
  ctx.subgradient = subgradient;
  return ctx;
}

// ---------------------------------------------------------------------------

struct Common {
  std::string fn;
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string mode = "eval";
  std::string out;
};

void add_fn(CLI::App* c, Common& o, bool required = true) {
  auto* opt = c->add_option("--fn", o.fn, "Activation name (catalog kind or composite)");
  if (required) opt->required();
  c->add_option("--param", o.params, "Parameter override name=value (repeatable)");
}

int cmd_eval(const Common& o, double x, double sub) {
  const Unit u = resolve_unit(o.fn, o.params);
  EvalContext ctx = make_context(o.mode, resolve_seed(o.seed), sub);
  const Point p = evaluate(u, x, ctx);
  if (o.format == "json")
    std::cout << json{{"fn", u.name()}, {"x", x}, {"value", p.value}, {"d_dx", p.d_dx}}.dump() << "\n";
  else
    std::cout << io::sig12(p.value) << "\n";
  return 0;
}

int cmd_table(const Common& o, double from, double to, double step, double sub) {
  if (!(std::isfinite(from) && std::isfinite(to) && from < to)) throw Usage("--from/--to", "need finite from < to");
  if (!(step > 0)) throw Usage("--step", "must be > 0");
  const Unit u = resolve_unit(o.fn, o.params);
  EvalContext ctx = make_context(o.mode, resolve_seed(o.seed), sub);
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  io::Table t{{"x", "value", "d_dx"}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = from + step * static_cast<double>(i);
    const Point p = evaluate(u, x, ctx);
    t.rows.push_back({x, p.value, p.d_dx});
  }
  if (o.format == "json") {
    json a = json::array();
    for (const auto& r : t.rows) a.push_back({{"x", r[0]}, {"value", r[1]}, {"d_dx", r[2]}});
    emit(a.dump() + "\n", o.out);
  } else {
    emit(io::to_csv(t), o.out);
  }
  return 0;
}

struct CheckJob {
  Unit unit;
  std::string variant;
};

json report_json(const GradCheckReport& r, const std::string& variant) {
  json params = json::array();
  for (const auto& p : r.params) params.push_back({{"name", p.name}, {"max_rel_error", p.max_rel_error}, {"worst_x", p.worst_x}});
  json ex = json::array();
  for (const auto& [a, b] : r.excluded) ex.push_back({a, b});
  return {{"fn", r.label},         {"variant", variant},   {"samples", r.samples},
          {"max_rel_error", r.max_rel_error}, {"worst_x", r.worst_x}, {"worst_quantity", r.worst_quantity},
          {"tolerance", r.tolerance}, {"pass", r.pass},   {"params", params},
          {"excluded", ex}};
}

int cmd_grad_check(const Common& o, bool all, double tol, std::size_t samples, double lo, double hi, unsigned jobs,
                   int perturbations) {
  if (!all && o.fn.empty()) throw Usage("--fn", "give a function name or --all");
  if (!(tol > 0)) throw Usage("--tol", "must be > 0");
  if (samples < 100) throw Usage("--samples", "at least 100 required");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw Usage("--from/--to", "need finite from < to");

  std::vector<Unit> units;
  if (all) {
    for (const auto& n : unit_names()) units.push_back(*Unit::from_name(n));
  } else {
    units.push_back(resolve_unit(o.fn, o.params));
  }
  std::vector<CheckJob> work;
  for (const auto& u : units) {
    work.push_back({u, "default"});
    for (int w = 1; w <= perturbations; ++w) work.push_back({u.perturbed(w), "perturbed-" + std::to_string(w)});
  }

  std::vector<GradCheckReport> reports(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < work.size();)
      reports[i] = grad_check(work[i].unit.checkable(lo, hi), lo, hi, samples, tol);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t failed = 0;
  for (const auto& r : reports) failed += !r.pass;
  if (o.format == "json") {
    json a = json::array();
    for (std::size_t i = 0; i < work.size(); ++i) a.push_back(report_json(reports[i], work[i].variant));
    emit(json{{"checks", a}, {"failed", failed}}.dump(2) + "\n", o.out);
  } else {
    std::string s;
    for (std::size_t i = 0; i < work.size(); ++i) {
      const auto& r = reports[i];
      char line[256];
      std::snprintf(line, sizeof line, "%-24s %-12s max_rel_error=%s samples=%zu %s\n", r.label.c_str(),
                    work[i].variant.c_str(), io::sig12(r.max_rel_error).c_str(), r.samples, r.pass ? "PASS" : "FAIL");
      s += line;
      if (!all) {
        for (const auto& p : r.params)
          s += "  d_d" + p.name + " max_rel_error=" + io::sig12(p.max_rel_error) + "\n";
        for (const auto& [a, b] : r.excluded)
          s += "  excluded [" + io::sig12(a) + ", " + io::sig12(b) + "]\n";
      }
    }
    s += std::to_string(work.size() - failed) + "/" + std::to_string(work.size()) + " checks passed\n";
    emit(s, o.out);
  }
  if (failed) throw CheckFailed{};
  return 0;
}

std::string fmt_bound(double v) {
  if (std::isnan(v)) return "diverges";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return io::sig12(v);
}

int cmd_props(const Common& o, bool list) {
  if (list) {
    for (const auto& n : unit_names()) std::cout << n << "\n";
    return 0;
  }
  if (o.fn.empty()) throw Usage("--fn", "give a function name or --list");
  const Unit u = resolve_unit(o.fn, o.params);
  json j{{"name", u.name()}};
  json params = json::array();
  const auto names = u.param_names();
  const auto roles = u.roles();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* role = roles[i] == Role::learnable ? "learnable" : roles[i] == Role::sampled ? "sampled" : "hyper";
    params.push_back({{"name", names[i]}, {"value", u.params()[i]}, {"role", role}});
  }
  if (u.is_scalar()) {
    const auto d = descriptor(u.param_set());
    j["family"] = std::string(family_name(d.family));
    j["anchor"] = std::string(d.anchor);
    j["range"] = {{"lo", fmt_bound(d.range.lo)}, {"hi", fmt_bound(d.range.hi)}, {"lo_closed", d.range.lo_closed},
                  {"hi_closed", d.range.hi_closed}};
    j["limit_neg"] = fmt_bound(d.limit_neg);
    j["limit_pos"] = fmt_bound(d.limit_pos);
    j["monotonic"] = d.monotonic;
    j["smooth"] = d.smooth;
    j["bounded"] = d.bounded;
    j["stochastic"] = d.stochastic;
    j["kinks"] = d.kinks;
  } else {
    j["family"] = "composite";
    j["breakpoints"] = u.breakpoints(-10, 10);
  }
  j["params"] = params;
  if (o.format == "json") {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "name        " << u.name() << "\n" << "family      " << j["family"].get<std::string>() << "\n";
  if (u.is_scalar()) {
    const auto d = descriptor(u.param_set());
    std::cout << "anchor      " << d.anchor << "\n"
              << "range       " << (d.range.lo_closed ? "[" : "(") << fmt_bound(d.range.lo) << ", "
              << fmt_bound(d.range.hi) << (d.range.hi_closed ? "]" : ")") << "\n"
              << "limits      " << fmt_bound(d.limit_neg) << " (x->-inf), " << fmt_bound(d.limit_pos)
              << " (x->+inf)\n"
              << "monotonic   " << (d.monotonic ? "yes" : "no") << "\n"
              << "smooth      " << (d.smooth ? "yes" : "no") << "\n"
              << "bounded     " << (d.bounded ? "yes" : "no") << "\n"
              << "stochastic  " << (d.stochastic ? "yes" : "no") << "\n"
              << "kinks      ";
    for (double k : d.kinks) std::cout << " " << io::sig12(k);
    std::cout << "\n";
  } else {
    std::cout << "breakpoints";
    for (double b : u.breakpoints(-10, 10)) std::cout << " " << io::sig12(b);
    std::cout << "\n";
  }
  for (const auto& p : params)
    std::cout << "param       " << p["name"].get<std::string>() << " = " << io::sig12(p["value"].get<double>()) << " ("
              << p["role"].get<std::string>() << ")\n";
  return 0;
}

struct TrainFlags {
  std::optional<int> rounds;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  std::string optimizer = "adam";
};

template <class Cfg>
void apply(Cfg& c, const TrainFlags& f, std::uint64_t seed) {
  c.seed = seed;
  if (f.rounds) {
    if (*f.rounds < 1) throw Usage("--rounds", "must be >= 1");
    c.rounds = *f.rounds;
  }
  if (f.lr) {
    if (!(*f.lr > 0)) throw Usage("--lr", "must be > 0");
    c.lr = *f.lr;
  }
  if (f.batch) {
    if (*f.batch < 1) throw Usage("--batch", "must be >= 1");
    c.batch = *f.batch;
  }
  c.optimizer = f.optimizer == "sgd" ? Optimizer::sgd : Optimizer::adam;
}

std::filesystem::path run_dir(const Common& o, const char* task, const Unit& u, std::uint64_t seed) {
  if (!o.out.empty()) return o.out;
  return std::string("runs/") + task + "-" + u.name() + "-" + std::to_string(seed);
}

int report_divergence(const std::optional<DivergenceInfo>& d, const std::filesystem::path& dir) {
  std::cerr << "actlib: training diverged at round " << d->round << ", batch " << d->batch << " (" << d->what
            << "); partial outputs in " << dir.string() << "\n";
  return 3;
}

int cmd_regression(const Common& o, const TrainFlags& f) {
  const Unit u = resolve_unit(o.fn, o.params);
  RegressionConfig cfg;
  apply(cfg, f, resolve_seed(o.seed));
  const auto r = run_regression(u, cfg);
  const auto dir = run_dir(o, "regression", u, cfg.seed);
  write_run(dir, cfg, u, r);
  if (r.diverged) return report_divergence(r.diverged, dir);
  const auto& last = r.log.rounds.back();
  std::cout << "rounds " << r.log.rounds.size() << "\nloss " << io::sig12(last.loss) << "\nval_loss "
            << io::sig12(last.val_loss) << "\noutput " << dir.string() << "\n";
  return 0;
}

int cmd_classification(const Common& o, const TrainFlags& f) {
  const Unit u = resolve_unit(o.fn, o.params);
  ClassificationConfig cfg;
  apply(cfg, f, resolve_seed(o.seed));
  const auto r = run_classification(u, cfg);
  const auto dir = run_dir(o, "classification", u, cfg.seed);
  write_run(dir, cfg, u, r);
  if (r.diverged) return report_divergence(r.diverged, dir);
  const auto& last = r.log.rounds.back();
  std::cout << "rounds " << r.log.rounds.size() << "\nloss " << io::sig12(last.loss) << "\nval_loss "
            << io::sig12(last.val_loss) << "\nval_accuracy " << io::sig12(r.final_accuracy())
            << "\nclass1_area " << io::sig12(r.grid.class1_fraction()) << "\noutput " << dir.string() << "\n";
  return 0;
}

int cmd_landscape(const Common& o, std::size_t res, std::size_t width, const std::string& svg) {
  if (res < 16) throw Usage("--resolution", "must be >= 16");
  if (width < 1) throw Usage("--width", "must be >= 1");
  const Unit u = resolve_unit(o.fn, o.params);
  LandscapeConfig cfg;
  cfg.resolution = res;
  cfg.width = width;
  const auto g = output_landscape(u, cfg, resolve_seed(o.seed));
  const auto t = landscape_table(g);
  const std::string out = o.out.empty() ? "landscape.csv" : o.out;
  if (auto parent = std::filesystem::path(out).parent_path(); !parent.empty()) std::filesystem::create_directories(parent);
  io::write_file(out, io::to_csv(t));
  if (!svg.empty()) io::write_file(svg, io::heat_plot(t, 0, 1, 2));
  std::cout << "roughness " << io::sig12(roughness(g)) << "\noutput " << out << "\n";
  return 0;
}

int cmd_plot(const std::string& in, const std::string& out, const std::string& xcol, std::vector<std::string> ycols,
             bool heat) {
  io::Table t;
  try {
    t = io::parse_csv(io::read_file(in));
  } catch (const Error& e) {
    throw Usage("--in", e.what());
  }
  auto col = [&](const std::string& flag, const std::string& name) {
    try {
      return t.column(name);
    } catch (const Error& e) {
      throw Usage(flag, e.what());
    }
  };
  const bool grid3 = t.header.size() == 3 &&
                     (t.header == std::vector<std::string>{"x", "y", "value"} ||
                      t.header == std::vector<std::string>{"x1", "x2", "label"});
  std::string svg;
  if (heat || (grid3 && xcol.empty() && ycols.empty())) {
    if (t.header.size() < 3) throw Usage("--heat", "needs three columns (x, y, value)");
    svg = io::heat_plot(t, 0, 1, 2);
  } else {
    const std::size_t xc = xcol.empty() ? 0 : col("--x", xcol);
    std::vector<std::size_t> yc;
    if (ycols.empty()) {
      for (std::size_t i = 0; i < t.header.size(); ++i)
        if (i != xc) yc.push_back(i);
    } else {
      for (const auto& y : ycols) yc.push_back(col("--y", y));
    }
    if (yc.empty()) throw Usage("--y", "nothing to plot");
    svg = io::line_plot(t, xc, yc);
  }
  const std::string target = out.empty() ? std::filesystem::path(in).replace_extension(".svg").string() : out;
  io::write_file(target, svg);
  std::cout << "output " << target << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activation function library: evaluation, gradient checks, experiments and plots."};
  app.require_subcommand(1);
  Common o;
  double x = 0, from = -5, to = 5, step = 0.1, sub = 0, tol = 1e-5;
  std::size_t samples = 1000, res = 200, width = 16;
  unsigned jobs = 1;
  int perturbations = 3;
  bool all = false, list = false, heat = false;
  std::string svg, in, xcol;
  std::vector<std::string> ycols;
  TrainFlags tf;

  auto common = [&](CLI::App* c, bool fn_required = true) {
    add_fn(c, o, fn_required);
    c->add_option("--seed", o.seed, "Random seed (default: AF_SEED or 42)");
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--out", o.out, "Output file or directory");
  };
  auto modes = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "Stochastic kinds: train draws, eval uses expectations")
        ->check(CLI::IsMember({"train", "eval"}));
    c->add_option("--subgradient", sub, "Weight on the steeper side at an exact kink")->check(CLI::Range(0.0, 1.0));
  };

  auto* eval = app.add_subcommand("eval", "Print f(x)");
  common(eval);
  modes(eval);
  eval->add_option("--x", x, "Input value")->required();

  auto* table = app.add_subcommand("table", "CSV of x, value, d_dx over a range");
  common(table);
  modes(table);
  table->add_option("--from", from, "Range start");
  table->add_option("--to", to, "Range end");
  table->add_option("--step", step, "Step");

  auto* gc = app.add_subcommand("grad-check", "Compare analytic derivatives with central differences");
  common(gc, false);
  gc->add_flag("--all", all, "Every catalog kind and composite");
  gc->add_option("--tol", tol, "Maximum relative error");
  gc->add_option("--samples", samples, "Samples per check");
  gc->add_option("--from", from, "Domain start");
  gc->add_option("--to", to, "Domain end");
  gc->add_option("--jobs", jobs, "Worker threads");
  gc->add_option("--perturbations", perturbations, "Perturbed parameter sets per function")->check(CLI::Range(0, 100));

  auto* props = app.add_subcommand("props", "Describe a function: range, limits, kinks, parameters");
  common(props, false);
  props->add_flag("--list", list, "List every accepted function name");

  auto* exp = app.add_subcommand("experiment", "Train a small network and write a run directory");
  exp->require_subcommand(1);
  auto train_flags = [&](CLI::App* c) {
    common(c);
    c->add_option("--rounds", tf.rounds, "Training rounds (default 50)");
    c->add_option("--lr", tf.lr, "Learning rate (default 0.01)");
    c->add_option("--batch", tf.batch, "Batch size (default 64)");
    c->add_option("--optimizer", tf.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  };
  auto* reg = exp->add_subcommand("regression", "Fit exp(-x^2) plus noise");
  train_flags(reg);
  auto* cls = exp->add_subcommand("classification", "Separate the inner disk of radius 0.5");
  train_flags(cls);

  auto* land = app.add_subcommand("landscape", "Output grid of an untrained network over [-2, 2]^2");
  common(land);
  land->add_option("--resolution", res, "Grid points per side");
  land->add_option("--width", width, "Hidden layer width");
  land->add_option("--svg", svg, "Also write a heat map");

  auto* plot = app.add_subcommand("plot", "Render a CSV as an SVG line or heat plot");
  plot->add_option("--in", in, "CSV file")->required();
  plot->add_option("--out", o.out, "SVG file (default: input with .svg)");
  plot->add_option("--x", xcol, "X column (default: first)");
  plot->add_option("--y", ycols, "Y columns (default: all others)")->delimiter(',');
  plot->add_flag("--heat", heat, "Treat the first three columns as x, y, value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "actlib: " << msg << "\n";
    return 2;
  }

  try {
    if (*eval) return cmd_eval(o, x, sub);
    if (*table) return cmd_table(o, from, to, step, sub);
    if (*gc) return cmd_grad_check(o, all, tol, samples, from, to, jobs, perturbations);
    if (*props) return cmd_props(o, list);
    if (*reg) return cmd_regression(o, tf);
    if (*cls) return cmd_classification(o, tf);
    if (*land) return cmd_landscape(o, res, width, svg);
    if (*plot) return cmd_plot(in, o.out, xcol, ycols, heat);
  } catch (const Usage& e) {
    std::cerr << "actlib: " << e.what() << "\n";
    return 2;
  } catch (const CheckFailed&) {
    return 1;
  } catch (const Divergence& e) {
    std::cerr << "actlib: " << e.what() << "\n";
    return 3;
  } catch (const InvalidParameter& e) {
    std::cerr << "actlib: " << e.what() << "\n";
    return 2;
  } catch (const NonFiniteInput& e) {
    std::cerr << "actlib: --x: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "actlib: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
