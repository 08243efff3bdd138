#ifndef DPDRO_SEPARATION_H_
#define DPDRO_SEPARATION_H_

#include <cstdint>
#include <vector>

#include "dpdro/distribution.h"
#include "dpdro/partition.h"

namespace dpdro {

// A DP constraint (phi, A) and its shortfall
//   V = P[X in A] - e^eps P[X' in A - phi] - delta,
// where X' is the source distribution itself (independent case) or the
// distribution of output cell `target` (dependent case, X from `source`).
struct Violation {
  std::int64_t phi_units = 0;
  Event event;
  double shortfall = 0;
  int source = -1;
  int target = -1;
};

struct OracleOptions {
  // Worker threads for the shift loop; the reduction is deterministic.
  int jobs = 1;
  // Use the quadratic per-shift pairing instead of the merged sweep.
  bool naive = false;
};

double shortfall_of(const NoiseDistribution& p, std::int64_t phi,
                    const Event& a);

// Shortfall of (phi, a) between output cells `source` and `target`.
double shortfall_of(const DependentNoise& f, int source, int target,
                    std::int64_t phi, const Event& a);

// Worst constraint over shifts in [-limit, limit] and events inside the
// event window. Candidate shifts are breakpoint differences plus +-limit,
// scanned in decreasing order; an exact tie keeps the larger shift.
Violation max_shortfall(const NoiseDistribution& p, const OracleOptions& opt = {});

// Worst constraint for each of the `count` most violated shifts, in
// decreasing shortfall; only shifts with shortfall > threshold are reported.
std::vector<Violation> top_shortfalls(const NoiseDistribution& p, int count,
                                      double threshold,
                                      const OracleOptions& opt = {});

// Pairs scanned by source, then target, then decreasing shift among
// {target - source - 1, target - source, target - source + 1} (output-cell
// offsets in beta units) within the shift limit.
Violation max_shortfall_dependent(const DependentNoise& f,
                                  const OracleOptions& opt = {});

std::vector<Violation> top_shortfalls_dependent(const DependentNoise& f,
                                                int count, double threshold,
                                                const OracleOptions& opt = {});

// Exhaustive search over every union of unit cells in the event window and
// every integer shift in [-limit, limit]. Refuses windows wider than 20 units.
Violation brute_force(const NoiseDistribution& p);
Violation brute_force(const DependentNoise& f);

struct AuditResult {
  bool feasible = false;
  Violation worst;
};

AuditResult audit(const NoiseDistribution& p, double tol = 1e-9,
                  const OracleOptions& opt = {});
AuditResult audit(const DependentNoise& f, double tol = 1e-9,
                  const OracleOptions& opt = {});

}  // namespace dpdro

#endif  // DPDRO_SEPARATION_H_
