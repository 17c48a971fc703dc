#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gsp/scan_statistics.hpp"
#include "test_util.hpp"

using namespace gsp;

namespace {

std::vector<double> central_difference(const ScanObjective& obj, std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = obj.value(x);
    x[i] = keep - h;
    const double down = obj.value(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// Table formulas for indicator vectors, written out directly.
double kulldorff_direct(const std::vector<double>& c, const std::vector<double>& b, const std::vector<int>& s) {
  double C = 0, B = 0, Ct = 0, Bt = 0;
  for (int v : s) C += c[static_cast<std::size_t>(v)], B += b[static_cast<std::size_t>(v)];
  for (std::size_t i = 0; i < c.size(); ++i) Ct += c[i], Bt += b[i];
  return C * std::log(C / B) + (Ct - C) * std::log((Ct - C) / (Bt - B)) - Ct * std::log(Ct / Bt);
}

double ebp_direct(const std::vector<double>& c, const std::vector<double>& b, const std::vector<int>& s) {
  double C = 0, B = 0;
  for (int v : s) C += c[static_cast<std::size_t>(v)], B += b[static_cast<std::size_t>(v)];
  return C * std::log(C / B) + B - C;
}

std::vector<double> indicator(std::size_t n, const std::vector<int>& s) {
  std::vector<double> x(n, 0.0);
  for (int v : s) x[static_cast<std::size_t>(v)] = 1.0;
  return x;
}

}  // namespace

TEST(Toy, ValueAndGradient) {
  std::vector<double> w{1, -2, 3};
  auto obj = ScanObjective::toy_quadratic(w);
  EXPECT_DOUBLE_EQ(obj.value(w), -0.5 * 14);
  std::vector<double> x{0.5, 0.5, 0.5};
  auto g = obj.gradient(x);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g[i], x[i] - w[i]);
  EXPECT_DOUBLE_EQ(obj.statistic(x), 1.0);
}

TEST(Ems, Examples) {
  auto obj = ScanObjective::ems({0.5, 0.5, 0});
  EXPECT_EQ(obj.value(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_NEAR(obj.value(std::vector<double>{1, 1, 0}), 0.5, 1e-11);
  EXPECT_THROW(ScanObjective::ems({0.5, 1.0}), InputError);
  EXPECT_THROW(obj.value(std::vector<double>{1, 1}), InputError);
}

TEST(Ems, GradientClosedForm) {
  std::vector<double> c{0.3, -0.2, 0.9, 0.1};
  auto obj = ScanObjective::ems(c);
  std::vector<double> x{0.2, 0.7, 0.4, 0.1};
  double cx = 0, s = 0;
  for (std::size_t i = 0; i < 4; ++i) cx += c[i] * x[i], s += x[i];
  auto g = obj.gradient(x);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(g[i], -2 * c[i] * cx / s + cx * cx / (s * s) + x[i], 1e-12);
}

TEST(Singular, GradientIsNegativeCounts) {
  std::vector<double> c{1, 4, 0};
  std::vector<double> zero(3, 0.0);
  for (auto obj : {ScanObjective::kulldorff(c, {1, 1, 1}), ScanObjective::ebp(c, {2, 2, 2})}) {
    EXPECT_EQ(obj.value(zero), 0.0);
    auto g = obj.gradient(zero);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g[i], -c[i]);
  }
  auto ems = ScanObjective::ems({0.1, -0.4, 0.2});
  EXPECT_EQ(ems.gradient(zero), (NodeVector{-0.1, 0.4, -0.2}));
}

TEST(Poisson, ValueMatchesTableFormulas) {
  std::vector<double> c{1, 9, 9, 1, 1}, b(5, 3.0);
  auto kd = ScanObjective::kulldorff(c, b);
  auto ebp = ScanObjective::ebp(c, b);
  for (const std::vector<int>& s : {std::vector<int>{1, 2}, std::vector<int>{0, 1}, std::vector<int>{2, 3, 4}}) {
    auto x = indicator(5, s);
    EXPECT_NEAR(kd.statistic(x), kulldorff_direct(c, b, s), 1e-9);
    EXPECT_NEAR(ebp.statistic(x), ebp_direct(c, b, s), 1e-9);
    EXPECT_NEAR(kd.value(x), -kulldorff_direct(c, b, s) + 0.5 * static_cast<double>(s.size()), 1e-9);
  }
}

TEST(Poisson, RejectsBadInputs) {
  EXPECT_THROW(ScanObjective::kulldorff({1, -1}, {1, 1}), InputError);
  EXPECT_THROW(ScanObjective::ebp({1, 1}, {1, -0.5}), InputError);
  EXPECT_THROW(ScanObjective::ebp({1, 1}, {1}), InputError);
}

TEST(Gradients, MatchCentralDifferences) {
  std::mt19937_64 rng(31);
  const int n = 30;
  for (StatKind kind : {StatKind::EMS, StatKind::KULLDORFF, StatKind::EBP}) {
    for (int point = 0; point < 50; ++point) {
      ScanObjective obj = [&] {
        if (kind == StatKind::EMS) return ScanObjective::ems(gsp::testing::uniform_vector(rng, n, -0.95, 0.95));
        auto c = gsp::testing::uniform_vector(rng, n, 0.0, 10.0);
        auto b = gsp::testing::uniform_vector(rng, n, 0.5, 5.0);
        return kind == StatKind::KULLDORFF ? ScanObjective::kulldorff(c, b) : ScanObjective::ebp(c, b);
      }();
      auto x = gsp::testing::uniform_vector(rng, n, 0.05, 0.95);
      auto g = obj.gradient(x);
      auto fd = central_difference(obj, x, 1e-6);
      for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_LE(std::abs(g[i] - fd[i]), std::max(1e-5 * std::abs(fd[i]), 1e-8))
            << to_string(kind) << " point " << point << " coord " << i;
    }
  }
}

// Hessian of the EMS objective by differencing the gradient, compared to
// I - (2/1'x) v v' with v = c - (c'x/1'x) 1.
TEST(Ems, HessianExpressionAndUpperBound) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6;
    auto c = normalize_counts_ems(gsp::testing::uniform_vector(rng, n, 0.0, 5.0));
    auto obj = ScanObjective::ems(c);
    auto x = gsp::testing::uniform_vector(rng, n, 0.05, 1.0);
    double cx = 0, s = 0;
    for (int i = 0; i < n; ++i) cx += c[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)], s += x[static_cast<std::size_t>(i)];
    const double r = cx / s;
    const double h = 1e-5;
    std::vector<std::vector<double>> hess(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j) {
      auto up = x, down = x;
      up[static_cast<std::size_t>(j)] += h;
      down[static_cast<std::size_t>(j)] -= h;
      auto gu = obj.gradient(up), gd = obj.gradient(down);
      for (int i = 0; i < n; ++i)
        hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (gu[static_cast<std::size_t>(i)] - gd[static_cast<std::size_t>(i)]) / (2 * h);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double vi = c[static_cast<std::size_t>(i)] - r, vj = c[static_cast<std::size_t>(j)] - r;
        const double expect = (i == j ? 1.0 : 0.0) - 2.0 / s * vi * vj;
        EXPECT_NEAR(hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], expect, 1e-6);
      }
    auto u = gsp::testing::uniform_vector(rng, n, -1.0, 1.0);
    double nu = 0;
    for (double v : u) nu += v * v;
    double q = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        q += u[static_cast<std::size_t>(i)] * hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
             u[static_cast<std::size_t>(j)];
    EXPECT_LE(q / nu, 1.0 + 1e-8);
  }
}

TEST(Normalize, Examples) {
  auto z = normalize_counts_ems(std::vector<double>{4, 4, 4});
  for (double v : z) EXPECT_EQ(v, 0.0);
  auto two = normalize_counts_ems(std::vector<double>{0, 10});
  EXPECT_NEAR(two[0], -0.99, 1e-15);
  EXPECT_NEAR(two[1], 0.99, 1e-15);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    auto v = normalize_counts_ems(gsp::testing::uniform_vector(rng, 20, -50, 50));
    double m = 0;
    for (double a : v) m = std::max(m, std::abs(a));
    EXPECT_LE(m, 0.99 + 1e-15);
  }
}

TEST(WrscDelta, Examples) {
  EXPECT_NEAR(wrsc_delta_ems(1.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(wrsc_delta_ems(0.5, std::sqrt(0.5)), std::sqrt(0.75), 1e-12);
  const double c = 0.6;
  EXPECT_THROW(wrsc_delta_ems(2 * (1 - c * c), c), InputError);
  EXPECT_THROW(wrsc_delta_ems(0.0, c), InputError);
  EXPECT_THROW(wrsc_delta_ems(0.5, 1.0), InputError);
}

TEST(WrscDelta, BelowOneOnDomain) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double c = 0.999 * u(rng);
    const double xi = 2 * (1 - c * c) * (0.001 + 0.998 * u(rng));
    const double d = wrsc_delta_ems(xi, c);
    EXPECT_LT(d, 1.0);
    EXPECT_GE(d, 0.0);
  }
}
