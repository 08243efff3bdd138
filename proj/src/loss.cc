#include "dpdro/loss.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpdro/partition.h"

namespace dpdro {
namespace {

std::string fmt_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

LossFunction LossFunction::l1() { return LossFunction(Kind::kL1, "l1"); }

LossFunction LossFunction::l2() { return LossFunction(Kind::kL2, "l2"); }

LossFunction LossFunction::pinball(double tau) {
  if (!(tau > 0 && tau < 1)) throw InvalidArgument("pinball tau must be in (0,1)");
  LossFunction f(Kind::kPinball, "pinball:" + fmt_param(tau));
  f.p1_ = tau;
  return f;
}

LossFunction LossFunction::capped_linear(double w, double s) {
  if (!(w > 0)) throw InvalidArgument("capped loss needs w > 0");
  if (!(s > 1)) throw InvalidArgument("capped loss needs slope s > 1");
  LossFunction f(Kind::kCapped, "capped:" + fmt_param(w) + ":" + fmt_param(s));
  f.p1_ = w;
  f.p2_ = s;
  return f;
}

LossFunction LossFunction::custom(std::string name,
                                  std::function<double(double)> c,
                                  double radius) {
  if (!c) throw InvalidArgument("custom loss needs an evaluator");
  if (!(radius > 0)) throw InvalidArgument("custom loss needs radius > 0");
  for (int i = 0; i <= 1024; ++i) {
    const double x = -4 * radius + 8 * radius * i / 1024.0;
    const double v = c(x);
    if (!(v >= 0) || !std::isfinite(v)) {
      throw InvalidArgument("custom loss '" + name + "' is negative or "
                            "non-finite at x = " + fmt_param(x));
    }
  }
  if (!(c(radius) >= c(0) + 1 && c(-radius) >= c(0) + 1)) {
    throw InvalidArgument("custom loss '" + name +
                          "' does not grow beyond its declared radius");
  }
  LossFunction f(Kind::kCustom, std::move(name));
  f.eval_ = std::move(c);
  f.radius_ = radius;
  return f;
}

double LossFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::kL1:
      return std::abs(x);
    case Kind::kL2:
      return x * x;
    case Kind::kPinball:
      return x >= 0 ? p1_ * x : (p1_ - 1) * x;
    case Kind::kCapped: {
      const double a = std::abs(x);
      return a <= p1_ ? a : p1_ + p2_ * (a - p1_);
    }
    case Kind::kCustom:
      return eval_(x);
  }
  return 0;
}

double LossFunction::antiderivative(double x) const {
  switch (kind_) {
    case Kind::kL1:
      return 0.5 * x * std::abs(x);
    case Kind::kL2:
      return x * x * x / 3;
    case Kind::kPinball:
      return x >= 0 ? 0.5 * p1_ * x * x : -0.5 * (1 - p1_) * x * x;
    case Kind::kCapped: {
      const double a = std::abs(x);
      const double w = p1_;
      const double g = a <= w ? 0.5 * a * a
                              : 0.5 * w * w + w * (a - w) + 0.5 * p2_ * (a - w) * (a - w);
      return x >= 0 ? g : -g;
    }
    case Kind::kCustom:
      break;
  }
  return 0;
}

double LossFunction::avg_coeff(double a, double b) const {
  if (!(b > a)) throw InvalidArgument("avg_coeff needs b > a");
  switch (kind_) {
    case Kind::kL1:
      if (a >= 0 || b <= 0) return std::abs(0.5 * (a + b));
      break;
    case Kind::kL2:
      return (a * a + a * b + b * b) / 3;
    case Kind::kCustom: {
      // Losses of additive noise are typically kinked at the origin.
      double v = 0, err = 0;
      const auto piece = [&](double lo, double hi) {
        double e = 0;
        v += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(eval_, lo, hi, 15,
                                                                            1e-12, &e);
        err += e;
      };
      if (a < 0 && b > 0) {
        piece(a, 0);
        piece(0, b);
      } else {
        piece(a, b);
      }
      if (!(err <= 1e-10 * std::max(1.0, b - a)) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "quadrature did not converge for loss '" << name_ << "' on cell ["
           << a << ", " << b << ")";
        throw NumericFailure(os.str());
      }
      return v / (b - a);
    }
    default:
      break;
  }
  return (antiderivative(b) - antiderivative(a)) / (b - a);
}

double LossFunction::inf_coeff(double a, double b) const {
  if (!(b > a)) throw InvalidArgument("inf_coeff needs b > a");
  if (kind_ != Kind::kCustom) return (*this)(std::clamp(0.0, a, b));
  constexpr int kGrid = 64;
  double best_x = a, best = eval_(a);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = a + (b - a) * i / kGrid;
    const double v = eval_(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const double h = (b - a) / kGrid;
  double lo = std::max(a, best_x - h), hi = std::min(b, best_x + h);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = eval_(x1), f2 = eval_(x2);
  while (hi - lo > 1e-10) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = eval_(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = eval_(x2);
    }
  }
  return std::min({best, f1, f2});
}

LossFunction parse_loss(const std::string& spec, double default_w) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw InvalidArgument("empty loss spec");
  const auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw InvalidArgument("bad number '" + s + "' in loss spec '" + spec + "'");
    }
    return v;
  };
  const std::string& kind = parts[0];
  if (kind == "l1" && parts.size() == 1) return LossFunction::l1();
  if (kind == "l2" && parts.size() == 1) return LossFunction::l2();
  if (kind == "pinball" && parts.size() == 2) {
    return LossFunction::pinball(num(parts[1]));
  }
  if (kind == "capped" && parts.size() == 1) {
    return LossFunction::capped_linear(default_w, 1000);
  }
  if (kind == "capped" && parts.size() == 3) {
    return LossFunction::capped_linear(num(parts[1]), num(parts[2]));
  }
  throw InvalidArgument("unknown loss spec '" + spec +
                        "' (expected l1, l2, pinball:T or capped:W:S)");
}

}  // namespace dpdro
