// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "actlib/catalog.hpp"
#include "actlib/composite.hpp"
#include "actlib/experiments.hpp"
#include "actlib/gradients.hpp"
#include "actlib/io.hpp"
#include "actlib/stochastic.hpp"
#include "actlib/unit.hpp"
#include "actlib/vector_ops.hpp"

using namespace actlib;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
};

unsigned workers() { return std::max(2u, std::thread::hardware_concurrency()); }

template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i; (i = next++) < n;) f(i);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers(); ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

ParamSet with(Kind k, std::initializer_list<std::pair<const char*, double>> kv) {
  ParamSet p = default_params(k);
  for (auto [n, v] : kv) set_param(p, n, v);
  return p;
}

template <class F>
double golden_min(F&& f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return (a + b) / 2;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = (a + b) / 2, fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return (a + b) / 2;
}

struct Job {
  Unit unit;
  std::string variant;
};

std::vector<Job> all_jobs() {
  std::vector<Job> jobs;
  for (const auto& n : unit_names()) {
    const Unit u = *Unit::from_name(n);
    jobs.push_back({u, "default"});
    for (int w = 1; w <= 3; ++w) jobs.push_back({u.perturbed(w), "perturbed-" + std::to_string(w)});
  }
  return jobs;
}

Outcome gradient_certification() {
  Outcome o;
  const auto jobs = all_jobs();
  const auto t0 = Clock::now();
  std::size_t passed = 0;
  for (const auto& j : jobs) {
    const auto r = grad_check(j.unit.checkable(-5, 5), -5, 5, 1000, 1e-5);
    passed += r.pass;
    o.require(r.pass, r.label + " " + j.variant + " err " + io::sig12(r.max_rel_error));
    o.require(r.samples == 1000, r.label + " sampled " + std::to_string(r.samples));
  }
  const double t = seconds_since(t0);
  o.require(t < 60, "took " + std::to_string(t) + " s");
  o.require(kink_guard == 1e-3, "guard band");
  if (o.pass) o.detail = std::to_string(passed) + "/" + std::to_string(jobs.size()) + " checks, " + io::sig12(t) + " s single-threaded";
  return o;
}

Outcome landmarks() {
  Outcome o;
  const double xs = golden_min([](double x) { return eval(Kind::silu, x); }, -4, 0);
  o.require(std::abs(eval(Kind::silu, xs) - -0.28) <= 0.01, "silu min value " + io::sig12(eval(Kind::silu, xs)));
  o.require(std::abs(xs - -1.28) <= 0.02, "silu min location " + io::sig12(xs));

  auto dres = [](double x) { return grad(Kind::resech, x).d_dx; };
  const double rp = bisect(dres, 0.5, 3), rn = bisect(dres, -3, -0.5);
  o.require(std::abs(rp - 1.19968) <= 1e-3 && std::abs(rn + 1.19968) <= 1e-3,
            "resech extrema " + io::sig12(rn) + ", " + io::sig12(rp));

  const double dmax = golden_min([](double x) { return -eval(Kind::dsilu, x); }, 0, 6);
  const double dmin = golden_min([](double x) { return eval(Kind::dsilu, x); }, -8, 0);
  o.require(std::abs(eval(Kind::dsilu, dmax) - 1.1) <= 0.02, "dsilu max " + io::sig12(eval(Kind::dsilu, dmax)));
  o.require(std::abs(eval(Kind::dsilu, dmin) - -0.1) <= 0.02, "dsilu min " + io::sig12(eval(Kind::dsilu, dmin)));
  o.require(std::abs(dmax - 2.4) <= 0.02 && std::abs(dmin + 2.4) <= 0.02,
            "dsilu extreme locations " + io::sig12(dmax) + ", " + io::sig12(dmin));

  const double xm = golden_min([](double x) { return eval(Kind::mish, x); }, -4, 0);
  o.require(std::abs(eval(Kind::mish, xm) - -0.31) <= 0.01, "mish infimum " + io::sig12(eval(Kind::mish, xm)));

  const auto a = softmax(std::vector<double>{2.0, 1.0, 0.1});
  const double want[] = {0.659001, 0.242433, 0.0985659};
  for (int i = 0; i < 3; ++i) o.require(std::abs(a[i] - want[i]) <= 1e-6, "softmax[" + std::to_string(i) + "]");
  return o;
}

Outcome table_reproduction() {
  Outcome o;
  const double printed[] = {0.00, 0.00, 0.04, 0.62, 2.28, 4.78, 7.66, 10.56, 13.33, 15.87};
  Rng rng(42, 4);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const double sigma = 0.1 * (i + 1);
    std::size_t neg = 0;
    for (int d = 0; d < 1000000; ++d) neg += 1.0 + sample_rt_offset(sigma, rng) < 0;
    const double mc = 100.0 * static_cast<double>(neg) / 1e6, exact = 100.0 * neg_prob(sigma);
    worst = std::max({worst, std::abs(mc - printed[i]), std::abs(exact - printed[i])});
    o.require(std::abs(exact - printed[i]) <= 0.3, "closed form at sigma " + io::sig12(sigma));
    o.require(std::abs(mc - printed[i]) <= 0.3, "sampled at sigma " + io::sig12(sigma));
  }
  if (o.pass) o.detail = "max deviation " + io::sig12(worst) + " pp";
  return o;
}

Outcome property_suite() {
  Outcome o;
  for (double m : {0.1, 1.0, 5.0, 50.0}) {
    const ParamSet p = with(Kind::psf, {{"m", m}});
    double prev = -1;
    bool mono = true;
    for (int i = 0; i <= 4000; ++i) {
      const double v = eval(Kind::psf, p, -20 + 0.01 * i);
      mono &= v >= prev;
      prev = v;
    }
    o.require(mono, "psf not monotone for m=" + io::sig12(m));
    o.require(eval(Kind::psf, p, 1e3) > 1 - 1e-9 && eval(Kind::psf, p, -1e3) < 1e-9, "psf limits for m=" + io::sig12(m));
  }

  auto dl = [](double x) { return grad(Kind::lisht, x).d_dx; };
  bool root_elsewhere = false;
  for (auto [a, b] : {std::pair{-10.0, -1e-6}, std::pair{1e-6, 10.0}}) {
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double l = a + (b - a) * i / n, r = a + (b - a) * (i + 1) / n;
      if (dl(l) == 0 || (dl(l) < 0) != (dl(r) < 0)) root_elsewhere = true;
    }
  }
  o.require(!root_elsewhere, "lisht derivative vanishes away from 0");
  o.require(dl(0.0) == 0.0, "lisht derivative at 0");

  std::mt19937 eng(5);
  std::normal_distribution<double> n(0, 2);
  double jac_err = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z(2 + t % 6);
    for (double& v : z) v = n(eng);
    const Matrix J = softmax_jacobian(z);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double h = 1e-5;
      auto zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const auto ap = softmax(zp), am = softmax(zm);
      for (std::size_t j = 0; j < z.size(); ++j) jac_err = std::max(jac_err, std::abs(J(i, j) - (ap[j] - am[j]) / (2 * h)));
    }
  }
  o.require(jac_err <= 1e-6, "softmax jacobian error " + io::sig12(jac_err));

  const std::vector<Kind> bases{Kind::identity, Kind::tanh, Kind::elu, Kind::softsign};
  double f0 = 0, d0 = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> c(bases.size());
    double s = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) s += c[i] = n(eng);
    c.back() = 1 - s;
    const HullSpec spec{false, bases, c};
    validate(spec);
    f0 = std::max(f0, std::abs(hull_combine(spec, 0.0)));
    d0 = std::max(d0, std::abs(composite::hull(bases, c, 0.0, {}).d - 1));
  }
  o.require(f0 <= 1e-10, "affine hull f(0) " + io::sig12(f0));
  o.require(d0 <= 1e-10, "affine hull f'(0) " + io::sig12(d0));
  return o;
}

Outcome reduction_suite() {
  Outcome o;
  double worst = 0;
  auto same = [&](const std::string& what, const std::function<double(double)>& f, const std::function<double(double)>& g) {
    double e = 0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = -10 + 0.01 * i;
      e = std::max(e, std::abs(f(x) - g(x)));
    }
    worst = std::max(worst, e);
    o.require(e <= 1e-12, what + " off by " + io::sig12(e));
  };
  auto fn = [](Kind k, ParamSet p) { return [k, p](double x) { return eval(k, p, x); }; };
  const auto relu = fn(Kind::relu, default_params(Kind::relu));
  const auto lrelu = fn(Kind::leaky_relu, default_params(Kind::leaky_relu));
  const auto elu1 = fn(Kind::elu, with(Kind::elu, {{"alpha", 1}}));

  same("mpelu(1,1) -> elu", fn(Kind::mpelu, with(Kind::mpelu, {{"alpha", 1}, {"beta", 1}})), elu1);
  same("mpelu(alpha=0) -> relu", fn(Kind::mpelu, with(Kind::mpelu, {{"alpha", 0}})), relu);
  same("s_shaped_relu -> relu",
       fn(Kind::s_shaped_relu, with(Kind::s_shaped_relu, {{"r", 1e9}, {"a", 1}, {"l", 0}, {"b", 0}})), relu);
  same("s_shaped_relu -> leaky_relu",
       fn(Kind::s_shaped_relu, with(Kind::s_shaped_relu, {{"r", 1e9}, {"a", 1}, {"l", 0}, {"b", 0.01}})), lrelu);
  same("lisa -> relu", fn(Kind::lisa, with(Kind::lisa, {{"alpha1", 1}, {"alpha2", 0}})), relu);
  same("lisa -> leaky_relu", fn(Kind::lisa, with(Kind::lisa, {{"alpha1", 1}, {"alpha2", 0.01}})), lrelu);
  same("sign_relu(a=0) -> relu", fn(Kind::sign_relu, with(Kind::sign_relu, {{"a", 0}})), relu);
  same("blu(beta=0) -> identity", fn(Kind::blu, with(Kind::blu, {{"beta", 0}})), [](double x) { return x; });
  same("eswish(beta=1) -> swish", fn(Kind::eswish, with(Kind::eswish, {{"beta", 1}})),
       fn(Kind::swish, with(Kind::swish, {{"beta", 1}})));
  same("felu -> elu", fn(Kind::felu, with(Kind::felu, {{"alpha", 1}})), elu1);
  same("maxout(x, 0) -> relu",
       [](double x) {
         MaxoutUnit u{Matrix(2, 1), {0.0, 0.0}};
         u.w(0, 0) = 1;
         return maxout(std::vector<double>{x}, u).value;
       },
       relu);
  same("mixed(1) -> leaky_relu", [](double x) { return mixed_eval(1.0, x); }, lrelu);
  same("mixed(0) -> elu", [](double x) { return mixed_eval(0.0, x); }, elu1);
  if (o.pass) o.detail = "max deviation " + io::sig12(worst);
  return o;
}

Outcome experiments() {
  Outcome o;
  std::string summary;
  for (Kind k : {Kind::tanh, Kind::relu, Kind::gelu_erf, Kind::swish}) {
    const RegressionConfig cfg;
    const auto t0 = Clock::now();
    const auto r = run_regression(k, default_params(k), cfg);
    const double t = seconds_since(t0);
    const std::string n(name(k));
    o.require(!r.diverged, n + " diverged");
    o.require(r.log.rounds.size() == 50, n + " round count");
    o.require(r.final_val_loss() <= 0.045, n + " val MSE " + io::sig12(r.final_val_loss()));
    o.require(t < 30, n + " regression took " + io::sig12(t) + " s");
    summary += n + " mse=" + io::shortest(std::round(r.final_val_loss() * 1e4) / 1e4) + " ";
  }
  for (Kind k : {Kind::relu, Kind::tanh, Kind::swish}) {
    const ClassificationConfig cfg;
    const auto r = run_classification(k, default_params(k), cfg);
    const std::string n(name(k));
    o.require(!r.diverged, n + " diverged");
    const double acc = r.final_accuracy();
    o.require(acc >= 0.90, n + " accuracy " + io::sig12(acc));
    o.require(r.confusion.total() == r.val_size, n + " confusion total");
    const double area = r.grid.class1_fraction();
    if (acc >= 0.95) o.require(std::abs(area - 0.25) <= 0.08, n + " class-1 area " + io::sig12(area));
    summary += n + " acc=" + io::shortest(acc) + " area=" + io::shortest(std::round(area * 1e3) / 1e3) + " ";
  }
  if (o.pass) o.detail = summary;
  return o;
}

Outcome smoothness() {
  Outcome o;
  const std::vector<Kind> hard{Kind::relu, Kind::hard_tanh, Kind::hard_sigmoid, Kind::hard_swish_piecewise};
  const std::vector<Kind> smooth{Kind::swish, Kind::gelu_erf, Kind::mish,     Kind::tanh,
                                 Kind::elu,   Kind::selu,     Kind::softplus, Kind::logistic};
  std::vector<std::pair<Kind, std::uint64_t>> work;
  for (Kind k : hard)
    for (std::uint64_t s = 1; s <= 20; ++s) work.push_back({k, s});
  for (Kind k : smooth)
    for (std::uint64_t s = 1; s <= 20; ++s) work.push_back({k, s});
  std::vector<double> rough(work.size());
  LandscapeConfig cfg;
  cfg.resolution = 200;
  const auto t0 = Clock::now();
  parallel_for(work.size(), [&](std::size_t i) {
    rough[i] = roughness(output_landscape(work[i].first, default_params(work[i].first), cfg, work[i].second));
  });
  const double t = seconds_since(t0);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
  };
  const std::size_t split = hard.size() * 20;
  const double mh = median({rough.begin(), rough.begin() + static_cast<long>(split)});
  const double ms = median({rough.begin() + static_cast<long>(split), rough.end()});
  o.require(mh > ms, "hard median " + io::sig12(mh) + " <= smooth median " + io::sig12(ms));
  o.require(t < 120, "took " + io::sig12(t) + " s");
  if (o.pass) o.detail = "median hard " + io::sig12(mh) + " vs smooth " + io::sig12(ms) + ", " + io::sig12(t) + " s";
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto base = std::filesystem::temp_directory_path() / "actlib_acceptance";
  std::filesystem::remove_all(base);
  {
    RegressionConfig cfg;
    cfg.rounds = 10;
    const Unit u = Unit::scalar(Kind::rrelu);
    write_run(base / "r1", cfg, u, run_regression(u, cfg));
    write_run(base / "r2", cfg, u, run_regression(u, cfg));
    ClassificationConfig c;
    c.rounds = 10;
    const Unit m = *Unit::from_name("mixed");
    write_run(base / "c1", c, m, run_classification(m, c));
    write_run(base / "c2", c, m, run_classification(m, c));
  }
  auto bytes = [&](const char* d) { return io::read_file((base / d / "metrics.json").string()); };
  o.require(bytes("r1") == bytes("r2"), "regression metrics.json differs between reruns");
  o.require(bytes("c1") == bytes("c2"), "classification metrics.json differs between reruns");
  std::filesystem::remove_all(base);

  const auto jobs = all_jobs();
  std::vector<GradCheckReport> serial(jobs.size()), parallel(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) serial[i] = grad_check(jobs[i].unit.checkable(-5, 5), -5, 5, 1000, 1e-5);
  parallel_for(jobs.size(), [&](std::size_t i) {
    const std::size_t j = jobs.size() - 1 - i;
    parallel[j] = grad_check(jobs[j].unit.checkable(-5, 5), -5, 5, 1000, 1e-5);
  });
  bool same = true;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    same &= serial[i].max_rel_error == parallel[i].max_rel_error && serial[i].worst_x == parallel[i].worst_x &&
            serial[i].pass == parallel[i].pass && serial[i].label == parallel[i].label;
  o.require(same, "grad-check reports depend on execution order");
  return o;
}

Outcome depth_ordering() {
  Outcome o;
  int ok = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    RegressionConfig cfg;
    cfg.seed = s;
    cfg.rounds = 1;
    const auto r = run_regression(Kind::logistic, default_params(Kind::logistic), cfg);
    const auto& g = r.log.rounds.front().grad_rms;
    ok += g.front() < g[2];
  }
  o.require(ok >= 8, std::to_string(ok) + "/10 seeds");
  if (o.pass) o.detail = std::to_string(ok) + "/10 seeds";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {"1 gradient certification", gradient_certification},
      {"2 landmark values", landmarks},
      {"3 negative-slope table", table_reproduction},
      {"4 analytic properties", property_suite},
      {"5 reduction suite", reduction_suite},
      {"6 regression and classification", experiments},
      {"7 landscape smoothness", smoothness},
      {"8 determinism", determinism},
      {"9 sigmoid depth ordering", depth_ordering},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s  %-34s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
