#ifndef DPDRO_LOSS_H_
#define DPDRO_LOSS_H_

#include <functional>
#include <string>

namespace dpdro {

// Non-negative loss c(x) on the noise value. Built-in kinds are continuous,
// minimized at 0 and grow without bound.
class LossFunction {
 public:
  enum class Kind { kL1, kL2, kPinball, kCapped, kCustom };

  static LossFunction l1();
  static LossFunction l2();
  // tau * max(x, 0) + (1 - tau) * max(-x, 0), tau in (0, 1).
  static LossFunction pinball(double tau);
  // |x| for |x| <= w, w + s * (|x| - w) beyond.
  static LossFunction capped_linear(double w, double s);
  // `radius`: c(x) >= c(0) + 1 is promised for |x| >= radius. Non-negativity
  // is probed on a grid over [-4 radius, 4 radius].
  static LossFunction custom(std::string name, std::function<double(double)> c,
                             double radius);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double operator()(double x) const;
  double radius() const { return radius_; }
  // Non-origin kink at +-kink() (0 if none).
  double kink() const { return kind_ == Kind::kCapped ? p1_ : 0; }

  // Mean of c over [a, b).
  double avg_coeff(double a, double b) const;
  // Infimum of c over [a, b).
  double inf_coeff(double a, double b) const;

 private:
  LossFunction(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  // Integral of c over [0, x] (signed for x < 0).
  double antiderivative(double x) const;

  Kind kind_;
  std::string name_;
  double p1_ = 0;
  double p2_ = 0;
  double radius_ = 1;
  std::function<double(double)> eval_;
};

// "l1", "l2", "pinball:TAU", "capped:W:S" or "capped" (W = default_w, S = 1000).
LossFunction parse_loss(const std::string& spec, double default_w = 1.0);

}  // namespace dpdro

#endif  // DPDRO_LOSS_H_
