#include "dpdro/distribution.h"

#include <cmath>
#include <string>

namespace dpdro {
namespace {

std::pair<std::int64_t, std::int64_t> window_of(const Partition& p,
                                                BoundKind bound,
                                                std::int64_t limit) {
  if (bound == BoundKind::kUpper) return {p.lo(), p.hi()};
  if (p.hi() - p.lo() <= 2 * limit) {
    throw InvalidArgument("lower-bound partition is not padded");
  }
  return {p.lo() + limit, p.hi() - limit};
}

}  // namespace

const char* to_string(BoundKind k) {
  return k == BoundKind::kUpper ? "upper" : "lower";
}

std::pair<std::int64_t, std::int64_t> NoiseDistribution::event_window() const {
  return window_of(partition, bound, shift_limit());
}

void NoiseDistribution::validate(double tol) const {
  if (weights.size() != partition.n_cells()) {
    throw InvalidArgument("weights do not match the partition (" +
                          std::to_string(weights.size()) + " vs " +
                          std::to_string(partition.n_cells()) + " cells)");
  }
  double total = 0;
  for (double w : weights) {
    if (!(w >= -tol) || !std::isfinite(w)) {
      throw InvalidArgument("weights must be non-negative and finite");
    }
    total += w;
  }
  if (std::abs(total - 1) > tol + 1e-13 * static_cast<double>(weights.size())) {
    throw InvalidArgument("weights must sum to 1");
  }
  budget.validate();
  (void)shift_limit();
}

std::pair<std::int64_t, std::int64_t> DependentNoise::event_window() const {
  return window_of(partition, bound, shift_limit());
}

}  // namespace dpdro
