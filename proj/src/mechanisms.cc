#include "dpdro/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpdro/bounds.h"

namespace dpdro {
namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// delta achieved by Gaussian noise of standard deviation s.
double gaussian_delta(double s, double eps, double df) {
  const double a = df / (2 * s), b = eps * s / df;
  const double tail = 0.5 * std::erfc((a + b) / std::numbers::sqrt2);
  return norm_cdf(a - b) - std::exp(eps) * tail;
}

// Integral of c(x) f(x) over [0, limit) for an even density f, folded so
// that asymmetric losses are handled: int (c(x) + c(-x)) f(x) dx.
double folded_integral(const LossFunction& loss, const std::function<double(double)>& f,
                       double limit) {
  const auto g = [&](double x) { return (loss(x) + loss(-x)) * f(x); };
  double err = 0, v = 0;
  const auto finite = [&](double a, double b) {
    double e = 0;
    v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 20, 1e-12, &e);
    err += e;
  };
  double start = 0;
  const double kink = loss.kink();
  if (kink > 0 && kink < limit) {
    finite(0, kink);
    start = kink;
  }
  if (std::isfinite(limit)) {
    finite(start, limit);
  } else {
    double e = 0;
    boost::math::quadrature::exp_sinh<double> integrator;
    v += integrator.integrate(g, start, std::numeric_limits<double>::infinity(), 1e-12, &e);
    err += e;
  }
  if (!std::isfinite(v) || err > 1e-10 * std::max(1.0, std::abs(v))) {
    throw NumericFailure("expected-loss quadrature did not converge");
  }
  return v;
}

}  // namespace

std::string Mechanism::name() const {
  switch (kind) {
    case Kind::kLaplace:
      return "laplace";
    case Kind::kGaussian:
      return "gaussian";
    case Kind::kAnalyticGaussian:
      return "analytic_gaussian";
    case Kind::kTruncatedLaplace:
      return "truncated_laplace";
    case Kind::kPiecewise:
      return "optimal";
  }
  return "unknown";
}

double Mechanism::stddev() const {
  return std::sqrt(expected_loss(*this, LossFunction::l2()));
}

Mechanism laplace(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (budget.delta_f.num <= 0) throw InvalidArgument("delta_f must be positive");
  Mechanism m;
  m.kind = Mechanism::Kind::kLaplace;
  m.budget = budget;
  m.scale = budget.delta_f.value() / budget.epsilon;
  return m;
}

Mechanism gaussian(const PrivacyBudget& budget) {
  budget.validate();
  Mechanism m;
  m.kind = Mechanism::Kind::kGaussian;
  m.budget = budget;
  m.scale = std::sqrt(2 * std::log(1.25 / budget.delta)) * budget.delta_f.value() /
            budget.epsilon;
  m.valid = budget.epsilon < 1;
  return m;
}

Mechanism analytic_gaussian(const PrivacyBudget& budget) {
  budget.validate();
  const double eps = budget.epsilon, df = budget.delta_f.value(), delta = budget.delta;
  double hi = df;
  for (int i = 0; gaussian_delta(hi, eps, df) > delta; ++i) {
    if (i > 200) throw NumericFailure("analytic Gaussian: cannot bracket sigma");
    hi *= 2;
  }
  double lo = hi;
  for (int i = 0; gaussian_delta(lo, eps, df) <= delta; ++i) {
    if (i > 2000) throw NumericFailure("analytic Gaussian: cannot bracket sigma");
    lo /= 2;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_delta(mid, eps, df) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  Mechanism m;
  m.kind = Mechanism::Kind::kAnalyticGaussian;
  m.budget = budget;
  m.scale = hi;
  return m;
}

Mechanism truncated_laplace(const PrivacyBudget& budget) {
  budget.validate();
  if (budget.delta >= 0.5) {
    throw InvalidArgument("truncated Laplace needs delta < 1/2");
  }
  Mechanism m;
  m.kind = Mechanism::Kind::kTruncatedLaplace;
  m.budget = budget;
  m.scale = budget.delta_f.value() / budget.epsilon;
  m.bound = m.scale * std::log1p(std::expm1(budget.epsilon) / (2 * budget.delta));
  return m;
}

Mechanism piecewise(NoiseDistribution p) {
  p.validate(1e-6);
  Mechanism m;
  m.kind = Mechanism::Kind::kPiecewise;
  m.budget = p.budget;
  m.piecewise = std::move(p);
  return m;
}

double near_optimal_lb(const PrivacyBudget& budget, const LossFunction& loss) {
  budget.validate();
  const bool l2 = loss.kind() == LossFunction::Kind::kL2;
  if (!l2 && loss.kind() != LossFunction::Kind::kL1) {
    throw InvalidArgument("near-optimal lower bound is defined for l1 and l2 only");
  }
  const double eps = budget.epsilon, df = budget.delta_f.value();
  const double a = (budget.delta + std::expm1(eps) / 2) * std::exp(-eps);
  const double r = std::exp(-eps);
  // m = max{m : sum_{i<m} a r^i <= 1/2}; the bound sums i^p a r^i for i <= m.
  double mass = 0, term = a, lb = 0;
  for (long i = 0;; ++i) {
    if (mass + term > 0.5) break;
    mass += term;
    const double x = static_cast<double>(i + 1);
    lb += (l2 ? x * x : x) * a * std::pow(r, x);
    term *= r;
    if (i > 100000000) throw NumericFailure("near-optimal bound did not terminate");
  }
  return 2 * lb * (l2 ? df * df : df);
}

double expected_loss(const Mechanism& m, const LossFunction& loss) {
  using K = LossFunction::Kind;
  const K lk = loss.kind();
  switch (m.kind) {
    case Mechanism::Kind::kPiecewise:
      return expected_loss(*m.piecewise, loss);
    case Mechanism::Kind::kLaplace: {
      const double b = m.scale;
      if (lk == K::kL1) return b;
      if (lk == K::kL2) return 2 * b * b;
      if (lk == K::kPinball) return 0.5 * b;
      return folded_integral(loss, [b](double x) { return std::exp(-x / b) / (2 * b); }, kInf);
    }
    case Mechanism::Kind::kGaussian:
    case Mechanism::Kind::kAnalyticGaussian: {
      const double s = m.scale;
      if (lk == K::kL1) return s * std::sqrt(2 / std::numbers::pi);
      if (lk == K::kL2) return s * s;
      if (lk == K::kPinball) return 0.5 * s * std::sqrt(2 / std::numbers::pi);
      return folded_integral(
          loss,
          [s](double x) {
            return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2 * std::numbers::pi));
          },
          kInf);
    }
    case Mechanism::Kind::kTruncatedLaplace: {
      const double lam = m.scale, t = m.bound / lam;
      const double q = std::expm1(t);
      if (lk == K::kL1) return lam * (1 - t / q);
      if (lk == K::kL2) return 2 * lam * lam * (1 - (t + 0.5 * t * t) / q);
      if (lk == K::kPinball) return 0.5 * lam * (1 - t / q);
      const double norm = 2 * lam * (1 - std::exp(-t));
      return folded_integral(
          loss, [lam, norm](double x) { return std::exp(-x / lam) / norm; }, m.bound);
    }
  }
  return 0;
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double sample(const Mechanism& m, std::mt19937_64& gen) {
  switch (m.kind) {
    case Mechanism::Kind::kLaplace: {
      const double u = uniform01(gen), sign = uniform01(gen) < 0.5 ? -1.0 : 1.0;
      return -sign * m.scale * std::log1p(-u);
    }
    case Mechanism::Kind::kGaussian:
    case Mechanism::Kind::kAnalyticGaussian: {
      const double u1 = uniform01(gen), u2 = uniform01(gen);
      return m.scale * std::sqrt(-2 * std::log1p(-u1)) *
             std::cos(2 * std::numbers::pi * u2);
    }
    case Mechanism::Kind::kTruncatedLaplace: {
      const double u = uniform01(gen), sign = uniform01(gen) < 0.5 ? -1.0 : 1.0;
      const double t = m.bound / m.scale;
      return sign * (-m.scale * std::log1p(-u * -std::expm1(-t)));
    }
    case Mechanism::Kind::kPiecewise: {
      const auto& p = *m.piecewise;
      const double u = uniform01(gen);
      double acc = 0;
      std::size_t j = 0;
      const std::size_t n = p.weights.size();
      for (; j < n; ++j) {
        acc += std::max(p.weights[j], 0.0);
        if (u < acc) break;
      }
      if (j == n) {
        j = n - 1;
        while (j > 0 && !(p.weights[j] > 0)) --j;
      }
      const auto [a, b] = p.partition.cell(j);
      return a + (b - a) * uniform01(gen);
    }
  }
  return 0;
}

GapReport suboptimality_gap(double b_ub, double b_lb, double ub, double lb) {
  if (b_ub < b_lb) throw InvalidArgument("baseline upper bound below lower bound");
  const double o = 0.5 * (ub + lb);
  const double den = std::max(o, 1.0);
  return {100 * (b_ub - b_lb) / den, 100 * (b_ub - o) / den, 100 * (o - b_lb) / den};
}

}  // namespace dpdro
