#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "actlib/vector_ops.hpp"
#include "oracles.hpp"

using namespace actlib;

TEST(Softmax, Examples) {
  const std::vector<double> z{2.0, 1.0, 0.1};
  const auto a = softmax(z);
  EXPECT_NEAR(a[0], 0.659001, 1e-6);
  EXPECT_NEAR(a[1], 0.242433, 1e-6);
  EXPECT_NEAR(a[2], 0.0985659, 1e-7);
  const auto ref = oracle::softmax(z);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], ref[i], 1e-15);
  for (double v : softmax(std::vector<double>{0, 0, 0})) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  const auto s1 = softmax(std::vector<double>{7.5, 8.5}), s2 = softmax(std::vector<double>{0, 1});
  EXPECT_NEAR(s1[0], s2[0], 1e-15);
  EXPECT_NEAR(s1[1], s2[1], 1e-15);
}

TEST(Softmax, Errors) {
  EXPECT_THROW(softmax(std::vector<double>{}), ShapeMismatch);
  EXPECT_THROW(softmax(std::vector<double>{1, NAN}), NonFiniteInput);
  EXPECT_THROW(softmax_jacobian(std::vector<double>{}), ShapeMismatch);
}

TEST(Softmax, SumsToOneAndShiftInvariant) {
  std::mt19937 eng(3);
  std::normal_distribution<double> n(0, 5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> z(1 + t % 9);
    for (double& v : z) v = n(eng);
    const auto a = softmax(z);
    double sum = 0;
    for (double v : a) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    auto shifted = z;
    for (double& v : shifted) v += 700;
    const auto b = softmax(shifted);
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), std::max_element(b.begin(), b.end()) - b.begin());
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
  for (double v : softmax(std::vector<double>{1000, 0})) EXPECT_TRUE(std::isfinite(v));
}

TEST(Jacobian, Examples) {
  const Matrix J = softmax_jacobian(std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(J(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(J(0, 1), -0.25);
  EXPECT_DOUBLE_EQ(J(1, 0), -0.25);
  EXPECT_DOUBLE_EQ(J(1, 1), 0.25);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  const std::vector<double> z{2.0, 1.0, 0.1};
  const Matrix J = softmax_jacobian(z);
  const auto a = softmax(z);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(J(i, i), a[i] * (1 - a[i]), 1e-15);
    double row = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double fd = oracle::deriv5(
          [&](double t) {
            auto w = z;
            w[i] = t;
            return oracle::softmax(w)[j];
          },
          z[i]);
      EXPECT_NEAR(J(i, j), fd, 1e-6);
      EXPECT_NEAR(J(i, j), J(j, i), 1e-15);
      row += J(i, j);
    }
    EXPECT_NEAR(row, 0.0, 1e-12);
  }
}

namespace {

MaxoutUnit random_unit(std::mt19937& eng, std::size_t k, std::size_t d) {
  std::normal_distribution<double> n(0, 1);
  MaxoutUnit u{Matrix(k, d), std::vector<double>(k)};
  for (double& v : u.w.data) v = n(eng);
  for (double& v : u.b) v = n(eng);
  return u;
}

}  // namespace

TEST(Maxout, Examples) {
  MaxoutUnit u{Matrix(2, 1), {3.0, -1.0}};
  const auto r = maxout(std::vector<double>{0.0}, u);
  EXPECT_EQ(r.value, 3.0);
  EXPECT_EQ(r.index, 0u);
  // one zero piece makes it ReLU of the other
  MaxoutUnit relu{Matrix(2, 3), {0.0, 0.0}};
  relu.w(0, 0) = 1;
  relu.w(0, 1) = -2;
  relu.w(0, 2) = 0.5;
  std::mt19937 eng(1);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x{n(eng), n(eng), n(eng)};
    EXPECT_DOUBLE_EQ(maxout(x, relu).value, std::max(0.0, x[0] - 2 * x[1] + 0.5 * x[2]));
  }
}

TEST(Maxout, Errors) {
  MaxoutUnit u{Matrix(2, 2), {0, 0}};
  EXPECT_THROW(maxout(std::vector<double>{1.0}, u), ShapeMismatch);
  MaxoutUnit one{Matrix(1, 1), {0}};
  EXPECT_THROW(maxout(std::vector<double>{1.0}, one), ShapeMismatch);
  MaxoutUnit badb{Matrix(2, 1), {0}};
  EXPECT_THROW(maxout(std::vector<double>{1.0}, badb), ShapeMismatch);
}

TEST(Maxout, SlopeCountAtMostPieces) {
  std::mt19937 eng(5);
  for (int t = 0; t < 50; ++t) {
    const MaxoutUnit u = random_unit(eng, 4, 1);
    std::set<std::size_t> winners;
    std::vector<double> slopes;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -20 + 0.01 * i;
      winners.insert(maxout(std::vector<double>{x}, u).index);
    }
    EXPECT_LE(winners.size(), 4u);
  }
}

TEST(Maxout, ConvexAlongLines) {
  std::mt19937 eng(9);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    const MaxoutUnit u = random_unit(eng, 2 + t % 5, 3);
    std::vector<double> x0{n(eng), n(eng), n(eng)}, dir{n(eng), n(eng), n(eng)};
    auto f = [&](double s) {
      std::vector<double> x(3);
      for (int i = 0; i < 3; ++i) x[i] = x0[i] + s * dir[i];
      return maxout(x, u).value;
    };
    for (int i = -100; i < 100; ++i) {
      const double s = 0.05 * i;
      ASSERT_GE(f(s - 0.05) - 2 * f(s) + f(s + 0.05), -1e-9);
    }
  }
}

TEST(Maxout, GradientRouting) {
  std::mt19937 eng(13);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    MaxoutUnit u = random_unit(eng, 3, 2);
    const std::vector<double> x{n(eng), n(eng)};
    const auto g = maxout_grad(x, u);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(g.d_db[j], j == g.winner ? 1.0 : 0.0);
      for (std::size_t i = 0; i < 2; ++i) {
        const double h = 1e-6;
        const double keep = u.w(j, i);
        u.w(j, i) = keep + h;
        const double up = maxout(x, u).value;
        u.w(j, i) = keep - h;
        const double down = maxout(x, u).value;
        u.w(j, i) = keep;
        if (maxout(x, u).index != g.winner) continue;
        // skip near-ties where the stencil changes the winner
        std::vector<double> z(3);
        for (std::size_t q = 0; q < 3; ++q) z[q] = u.b[q] + u.w(q, 0) * x[0] + u.w(q, 1) * x[1];
        bool tie = false;
        for (std::size_t q = 0; q < 3; ++q) tie |= q != g.winner && std::abs(z[q] - z[g.winner]) < 1e-4;
        if (tie) continue;
        EXPECT_NEAR(g.d_dw(j, i), (up - down) / (2 * h), 1e-6);
      }
    }
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(g.d_dx[i], u.w(g.winner, i));
  }
}

TEST(Maxout, TieKeepsFirstIndex) {
  MaxoutUnit u{Matrix(3, 1), {1.0, 1.0, 1.0}};
  const auto g = maxout_grad(std::vector<double>{0.0}, u);
  EXPECT_EQ(g.winner, 0u);
  EXPECT_EQ(g.d_db[0], 1.0);
  EXPECT_EQ(g.d_db[1], 0.0);
  EXPECT_EQ(maxout(std::vector<double>{0.0}, u).index, 0u);
}

TEST(Decode, Threshold) {
  EXPECT_EQ(threshold_decode(0.7), 1);
  EXPECT_EQ(threshold_decode(0.5), 0);
  EXPECT_EQ(threshold_decode(0.0), 0);
  EXPECT_EQ(threshold_decode(std::nextafter(0.5, 1.0)), 1);
}
