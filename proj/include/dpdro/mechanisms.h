#ifndef DPDRO_MECHANISMS_H_
#define DPDRO_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dpdro/distribution.h"
#include "dpdro/loss.h"

namespace dpdro {

struct Mechanism {
  enum class Kind { kLaplace, kGaussian, kAnalyticGaussian, kTruncatedLaplace, kPiecewise };

  Kind kind = Kind::kLaplace;
  PrivacyBudget budget;
  // Laplace b, Gaussian sigma, truncated-Laplace lambda (query units).
  double scale = 0;
  // Truncated-Laplace support radius B.
  double bound = 0;
  // False when the budget lies outside the construction's validity range.
  bool valid = true;
  std::optional<NoiseDistribution> piecewise;

  std::string name() const;
  double stddev() const;
};

// b = delta_f / epsilon; (epsilon, 0)-DP.
Mechanism laplace(const PrivacyBudget& budget);
// sigma = sqrt(2 ln(1.25 / delta)) delta_f / epsilon; valid for epsilon < 1.
Mechanism gaussian(const PrivacyBudget& budget);
// Smallest sigma with
//   Phi(D/(2s) - eps s/D) - e^eps Phi(-D/(2s) - eps s/D) <= delta.
Mechanism analytic_gaussian(const PrivacyBudget& budget);
// Density proportional to exp(-|x| / lambda) on [-B, B] with
// lambda = delta_f / epsilon, B = lambda ln(1 + (e^eps - 1) / (2 delta)).
Mechanism truncated_laplace(const PrivacyBudget& budget);
Mechanism piecewise(NoiseDistribution p);

// Closed-form lower bound on the l1 or l2 loss of any (epsilon, delta)-DP
// additive mechanism, from the discrete geometric construction with
// a = (delta + (e^eps - 1) / 2) e^-eps and ratio e^-eps.
double near_optimal_lb(const PrivacyBudget& budget, const LossFunction& loss);

double expected_loss(const Mechanism& m, const LossFunction& loss);

// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
double uniform01(std::mt19937_64& gen);
double sample(const Mechanism& m, std::mt19937_64& gen);

struct GapReport {
  double total = 0;  // 100 (B_UB - B_LB) / max(O, 1)
  double upper = 0;  // 100 (B_UB - O) / max(O, 1)
  double lower = 0;  // 100 (O - B_LB) / max(O, 1)
};

// O is the midpoint (ub + lb) / 2 of a certified bound pair.
GapReport suboptimality_gap(double b_ub, double b_lb, double ub, double lb);

}  // namespace dpdro

#endif  // DPDRO_MECHANISMS_H_
