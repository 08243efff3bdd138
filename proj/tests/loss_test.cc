#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dpdro/loss.h"
#include "dpdro/partition.h"

namespace dpdro {
namespace {

// Composite Simpson mean with kinks aligned to panel ends when they are at 0
// or +-w; fine enough for 1e-9 on the piecewise-polynomial losses below.
double simpson_mean(const LossFunction& c, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = c(a) + c(b);
  for (int i = 1; i < n; ++i) s += c(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3 / (b - a);
}

double grid_min(const LossFunction& c, double a, double b, int n = 200000) {
  double m = c(a);
  for (int i = 1; i < n; ++i) m = std::min(m, c(a + (b - a) * i / n));
  return m;
}

std::vector<LossFunction> builtins() {
  return {LossFunction::l1(), LossFunction::l2(), LossFunction::pinball(0.9),
          LossFunction::pinball(0.3), LossFunction::capped_linear(1, 1000),
          LossFunction::capped_linear(0.5, 3)};
}

TEST(Loss, Examples) {
  const auto l1 = LossFunction::l1();
  const auto l2 = LossFunction::l2();
  EXPECT_DOUBLE_EQ(l1.avg_coeff(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(l1.avg_coeff(1, 1.5), 1.25);
  EXPECT_NEAR(l2.avg_coeff(-1, 0), 1.0 / 3, 1e-15);
  EXPECT_EQ(l1.inf_coeff(0, 1), 0);
  EXPECT_EQ(l1.inf_coeff(1, 1.5), 1);
  EXPECT_EQ(l2.inf_coeff(-2, -1), 1);
  EXPECT_THROW(l1.avg_coeff(1, 1), InvalidArgument);
}

TEST(Loss, CappedLinear) {
  const auto c = LossFunction::capped_linear(1, 1000);
  EXPECT_DOUBLE_EQ(c(0.5), 0.5);
  EXPECT_DOUBLE_EQ(c(2), 1001);
  EXPECT_DOUBLE_EQ(c(-2), 1001);
  EXPECT_NEAR(c(1 - 1e-12), 1, 1e-9);
  EXPECT_NEAR(c(1 + 1e-12), 1, 2e-9);
  EXPECT_THROW(LossFunction::capped_linear(1, 1), InvalidArgument);
  EXPECT_THROW(LossFunction::capped_linear(0, 5), InvalidArgument);
}

TEST(Loss, Pinball) {
  const auto p = LossFunction::pinball(0.9);
  EXPECT_DOUBLE_EQ(p(2), 1.8);
  EXPECT_NEAR(p(-2), 0.2, 1e-15);
  EXPECT_THROW(LossFunction::pinball(1), InvalidArgument);
}

TEST(Loss, CoefficientsMatchQuadrature) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-5, 5), w(0.01, 3);
  for (const auto& c : builtins()) {
    for (int rep = 0; rep < 40; ++rep) {
      const double a = u(gen), b = a + w(gen);
      const double avg = c.avg_coeff(a, b);
      EXPECT_NEAR(avg, simpson_mean(c, a, b), 1e-6 * std::max(1.0, avg)) << c.name();
      const double inf = c.inf_coeff(a, b);
      EXPECT_NEAR(inf, grid_min(c, a, b), 1e-4 * (b - a) * std::max(1.0, inf)) << c.name();
      EXPECT_LE(inf, avg + 1e-12);
    }
  }
}

TEST(Loss, Additivity) {
  for (const auto& c : builtins()) {
    const double a = -1.3, m = 0.4, b = 2.2;
    const double whole = c.avg_coeff(a, b) * (b - a);
    const double parts = c.avg_coeff(a, m) * (m - a) + c.avg_coeff(m, b) * (b - m);
    EXPECT_NEAR(whole, parts, 1e-9 * std::max(1.0, whole)) << c.name();
  }
}

TEST(Loss, EvenLossesMirror) {
  for (const auto& c : {LossFunction::l1(), LossFunction::l2(),
                        LossFunction::capped_linear(1, 1000)}) {
    for (double a : {-2.5, -0.25, 0.0, 1.0}) {
      const double b = a + 0.75;
      EXPECT_NEAR(c.avg_coeff(a, b), c.avg_coeff(-b, -a), 1e-12 * std::max(1.0, c(b)));
      EXPECT_NEAR(c.inf_coeff(a, b), c.inf_coeff(-b, -a), 1e-12);
    }
  }
}

TEST(Loss, CustomMatchesBuiltin) {
  const auto c = LossFunction::custom("abs", [](double x) { return std::fabs(x); }, 2);
  const auto l1 = LossFunction::l1();
  for (double a : {-3.0, -0.5, 0.25, 1.0}) {
    EXPECT_NEAR(c.avg_coeff(a, a + 0.7), l1.avg_coeff(a, a + 0.7), 1e-9);
    EXPECT_NEAR(c.inf_coeff(a, a + 0.7), l1.inf_coeff(a, a + 0.7), 1e-9);
  }
  const auto q = LossFunction::custom("quartic", [](double x) { return x * x * x * x; }, 1.5);
  EXPECT_NEAR(q.avg_coeff(0, 1), 0.2, 1e-9);
  EXPECT_NEAR(q.inf_coeff(-1, 2), 0, 1e-9);
}

TEST(Loss, CustomIsProbed) {
  EXPECT_THROW(LossFunction::custom("neg", [](double x) { return x; }, 1), InvalidArgument);
  EXPECT_THROW(LossFunction::custom("flat", [](double) { return 1.0; }, 1), InvalidArgument);
  EXPECT_THROW(LossFunction::custom("none", nullptr, 1), InvalidArgument);
}

TEST(Loss, ParseSpec) {
  EXPECT_EQ(parse_loss("l1").kind(), LossFunction::Kind::kL1);
  EXPECT_EQ(parse_loss("l2").kind(), LossFunction::Kind::kL2);
  EXPECT_DOUBLE_EQ(parse_loss("pinball:0.9")(1), 0.9);
  EXPECT_DOUBLE_EQ(parse_loss("capped:1:1000")(2), 1001);
  EXPECT_DOUBLE_EQ(parse_loss("capped", 0.5)(1), 0.5 + 1000 * 0.5);
  EXPECT_THROW(parse_loss("l3"), InvalidArgument);
  EXPECT_THROW(parse_loss("pinball:x"), InvalidArgument);
  EXPECT_THROW(parse_loss("pinball:1.5"), InvalidArgument);
  EXPECT_THROW(parse_loss("capped:1"), InvalidArgument);
}

}  // namespace
}  // namespace dpdro
