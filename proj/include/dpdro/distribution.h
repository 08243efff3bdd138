#ifndef DPDRO_DISTRIBUTION_H_
#define DPDRO_DISTRIBUTION_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpdro/partition.h"

namespace dpdro {

enum class BoundKind { kUpper, kLower };

const char* to_string(BoundKind k);

// Piecewise-constant noise density: weights[j] is the mass of cell j. Lower
// distributions live on the padded partition; their DP events stay inside the
// unpadded support.
struct NoiseDistribution {
  Partition partition;
  std::vector<double> weights;
  PrivacyBudget budget;
  std::string loss = "l1";
  BoundKind bound = BoundKind::kUpper;
  double certified_tol = 1e-9;
  double objective = 0;

  // Shift limit delta_f / beta in beta units.
  std::int64_t shift_limit() const { return partition.units_per(budget.delta_f); }
  // Half-open event universe [lo, hi) in beta units.
  std::pair<std::int64_t, std::int64_t> event_window() const;
  // Throws InvalidArgument unless weights match the partition, are
  // non-negative and sum to 1 within tol.
  void validate(double tol = 1e-9) const;
};

// One noise distribution per output cell [phi_lo + k, phi_lo + k + 1) (beta
// units), all on a shared partition.
struct DependentNoise {
  Partition partition;
  std::vector<std::vector<double>> weights;
  PrivacyBudget budget;
  std::int64_t phi_lo = 0;
  // Output density per cell (w_k for upper, its infimum for lower).
  std::vector<double> output_weights;
  std::string loss = "l1";
  BoundKind bound = BoundKind::kUpper;
  double certified_tol = 1e-9;
  double objective = 0;

  std::size_t n_outputs() const { return weights.size(); }
  std::int64_t shift_limit() const { return partition.units_per(budget.delta_f); }
  std::pair<std::int64_t, std::int64_t> event_window() const;
};

}  // namespace dpdro

#endif  // DPDRO_DISTRIBUTION_H_
