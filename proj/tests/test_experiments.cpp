#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "actlib/experiments.hpp"
#include "actlib/io.hpp"

using namespace actlib;

TEST(Data, Regression) {
  const RegressionConfig cfg;
  const Dataset d = gen_regression_data(cfg);
  ASSERT_EQ(d.size(), 601u);
  EXPECT_EQ(d.x(0, 0), -3.0);
  EXPECT_EQ(d.x(300, 0), 0.0);
  EXPECT_EQ(d.x(600, 0), 3.0);
  EXPECT_DOUBLE_EQ(d.x(1, 0), -2.99);
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = d.y(i, 0) - std::exp(-d.x(i, 0) * d.x(i, 0));
    s += r;
    s2 += r * r;
  }
  const double mean = s / 601, sd = std::sqrt(s2 / 601 - mean * mean);
  EXPECT_NEAR(sd, 0.15, 0.02);
  EXPECT_EQ(gen_regression_data(cfg).y.data, d.y.data);
  RegressionConfig other = cfg;
  other.seed = 7;
  EXPECT_NE(gen_regression_data(other).y.data, d.y.data);
}

TEST(Data, Disk) {
  const ClassificationConfig cfg;
  const Dataset d = gen_disk_data(cfg);
  ASSERT_EQ(d.size(), 1000u);
  double ones = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = std::hypot(d.x(i, 0), d.x(i, 1));
    EXPECT_LE(r, 1.0);
    EXPECT_EQ(d.y(i, 0), r < 0.5 ? 1.0 : 0.0);
    ones += d.y(i, 0);
  }
  EXPECT_NEAR(ones / 1000, 0.25, 0.05);
  EXPECT_EQ(gen_disk_data(cfg).x.data, d.x.data);
}

TEST(Defaults, MatchProtocol) {
  const RegressionConfig r;
  EXPECT_EQ(r.noise, 0.15);
  EXPECT_EQ(r.hidden, (std::vector<std::size_t>{10, 10, 10}));
  EXPECT_EQ(r.lr, 0.01);
  EXPECT_EQ(r.batch, 64u);
  EXPECT_EQ(r.rounds, 50);
  const ClassificationConfig c;
  EXPECT_EQ(c.points, 1000u);
  EXPECT_EQ(c.radius, 0.5);
  EXPECT_EQ(c.hidden, (std::vector<std::size_t>{5, 5}));
  const LandscapeConfig l;
  EXPECT_EQ(l.lo, -2.0);
  EXPECT_EQ(l.hi, 2.0);
  EXPECT_EQ(l.depth, 3u);
  EXPECT_EQ(l.width, 16u);
}

TEST(Roughness, Examples) {
  Grid g{50, -2, 2, std::vector<double>(2500, 3.0)};
  EXPECT_EQ(roughness(g), 0.0);
  const auto c = lattice(-2, 2, 50);
  for (std::size_t j = 0; j < 50; ++j)
    for (std::size_t i = 0; i < 50; ++i) g.v[j * 50 + i] = 0.7 * c[i] - 1.3 * c[j] + 0.2;
  EXPECT_NEAR(roughness(g), 0.0, 1e-9);
  // |x| along one axis: only the crease column contributes
  Grid a{51, -2, 2, std::vector<double>(51 * 51)};
  const auto ca = lattice(-2, 2, 51);
  for (std::size_t j = 0; j < 51; ++j)
    for (std::size_t i = 0; i < 51; ++i) a.v[j * 51 + i] = std::abs(ca[i]);
  const double h = a.spacing();
  // the crease at x = 0 gives |Laplacian| = 2h / h^2 on 49 interior rows
  EXPECT_NEAR(roughness(a), 49 * (2 * h) / (h * h) / (49.0 * 49.0), 1e-9);
  EXPECT_THROW(roughness(Grid{2, 0, 1, std::vector<double>(4)}), InvalidParameter);
}

TEST(Landscape, ShapeDeterminismAndPlanarLinear) {
  LandscapeConfig cfg;
  cfg.resolution = 40;
  const Grid g = output_landscape(Kind::tanh, default_params(Kind::tanh), cfg, 3);
  EXPECT_EQ(g.v.size(), 1600u);
  EXPECT_EQ(output_landscape(Kind::tanh, default_params(Kind::tanh), cfg, 3).v, g.v);
  EXPECT_NE(output_landscape(Kind::tanh, default_params(Kind::tanh), cfg, 4).v, g.v);
  const Grid lin = output_landscape(Kind::identity, default_params(Kind::identity), cfg, 3);
  EXPECT_NEAR(roughness(lin), 0.0, 1e-9);
  EXPECT_GT(roughness(output_landscape(Kind::relu, default_params(Kind::relu), cfg, 3)), 0.0);
  cfg.resolution = 15;
  EXPECT_THROW(output_landscape(Kind::tanh, default_params(Kind::tanh), cfg, 3), InvalidParameter);
}

TEST(Runs, RegressionStructureAndQuality) {
  const RegressionConfig cfg;
  const auto r = run_regression(Kind::tanh, default_params(Kind::tanh), cfg);
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.log.rounds.size(), 50u);
  EXPECT_EQ(r.train_size + r.val_size, 601u);
  EXPECT_EQ(r.train_size, 480u);
  EXPECT_EQ(r.log.batches.size(), 50u * 8);
  EXPECT_LE(r.final_val_loss(), 0.045);
}

TEST(Runs, ClassificationStructureAndQuality) {
  const ClassificationConfig cfg;
  const auto r = run_classification(Kind::relu, default_params(Kind::relu), cfg);
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.log.rounds.size(), 50u);
  EXPECT_EQ(r.confusion.total(), r.val_size);
  EXPECT_EQ(r.val_size, 200u);
  for (const auto& rec : r.log.rounds) {
    ASSERT_TRUE(rec.confusion);
    EXPECT_EQ(rec.confusion->total(), 200u);
  }
  EXPECT_GE(r.final_accuracy(), 0.90);
  EXPECT_EQ(r.grid.resolution, 200u);
  EXPECT_EQ(r.grid.label.size(), 40000u);
  if (r.final_accuracy() >= 0.95) {
    EXPECT_NEAR(r.grid.class1_fraction(), 0.25, 0.08);
  }
}

TEST(Runs, TanhLossFallsForEverySeed) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    RegressionConfig cfg;
    cfg.seed = s;
    const auto r = run_regression(Kind::tanh, default_params(Kind::tanh), cfg);
    EXPECT_LT(r.log.rounds.back().loss, r.log.rounds.front().loss) << "seed " << s;
  }
}

TEST(Runs, SigmoidGradientsShrinkWithDepth) {
  int ok = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    RegressionConfig cfg;
    cfg.seed = s;
    cfg.rounds = 1;
    const auto r = run_regression(Kind::logistic, default_params(Kind::logistic), cfg);
    const auto& g = r.log.rounds.front().grad_rms;
    ok += g[0] < g[2];
  }
  EXPECT_GE(ok, 8);
}

TEST(Runs, DivergenceIsReported) {
  RegressionConfig cfg;
  cfg.optimizer = Optimizer::sgd;
  cfg.lr = 1e200;
  cfg.rounds = 3;
  const auto r = run_regression(Kind::relu, default_params(Kind::relu), cfg);
  ASSERT_TRUE(r.diverged);
  EXPECT_GE(r.diverged->round, 1);
  EXPECT_EQ(divergence_json(r.diverged)["status"], "diverged");
}

TEST(Output, RunDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "actlib_test_run";
  std::filesystem::remove_all(dir);
  ClassificationConfig cfg;
  cfg.rounds = 3;
  cfg.grid = 20;
  const Unit u = Unit::scalar(Kind::tanh);
  const auto r = run_classification(u, cfg);
  write_run(dir, cfg, u, r);
  for (const char* f : {"config.json", "metrics.json", "metrics.csv", "confusion.csv", "boundary.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto conf = nlohmann::json::parse(io::read_file((dir / "config.json").string()));
  EXPECT_EQ(conf["status"], "complete");
  EXPECT_EQ(conf["seed"], 42);
  EXPECT_EQ(conf["rounds"], 3);
  const auto metrics = io::parse_csv(io::read_file((dir / "metrics.csv").string()));
  EXPECT_EQ(metrics.rows.size(), 3u);
  EXPECT_EQ(metrics.header.front(), "round");
  const auto boundary = io::parse_csv(io::read_file((dir / "boundary.csv").string()));
  EXPECT_EQ(boundary.header, (std::vector<std::string>{"x1", "x2", "label"}));
  EXPECT_EQ(boundary.rows.size(), 400u);
  const auto conf_csv = io::parse_csv(io::read_file((dir / "confusion.csv").string()));
  double total = 0;
  for (const auto& row : conf_csv.rows) total += row[1] + row[2];
  EXPECT_EQ(total, 200.0);
  std::filesystem::remove_all(dir);
}

TEST(Io, NumberFormatsRoundTrip) {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(io::shortest(v)), v);
  }
  EXPECT_EQ(io::sig12(0.5), "0.500000000000");
  io::Table t{{"a", "b"}, {{1.0 / 3, -0.0}, {1e-20, 12345.678}}};
  const auto back = io::parse_csv(io::to_csv(t));
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_ANY_THROW(io::parse_csv("a,b\n1,x\n"));
  EXPECT_ANY_THROW(io::parse_csv("a,b\n1\n"));
}

TEST(Io, Svg) {
  io::Table t{{"x", "y1", "y2"}, {}};
  for (int i = 0; i < 20; ++i) t.rows.push_back({0.1 * i, std::sin(0.1 * i), std::cos(0.1 * i)});
  const std::string line = io::line_plot(t, 0, {1, 2});
  EXPECT_EQ(line.rfind("<svg", 0), 0u);
  EXPECT_NE(line.find("polyline"), std::string::npos);
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  io::Table h{{"x", "y", "value"}, {}};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) h.rows.push_back({double(i), double(j), double(i * j)});
  const std::string heat = io::heat_plot(h, 0, 1, 2);
  EXPECT_NE(heat.find("<rect"), std::string::npos);
}
