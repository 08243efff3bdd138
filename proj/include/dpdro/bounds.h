#ifndef DPDRO_BOUNDS_H_
#define DPDRO_BOUNDS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpdro/distribution.h"
#include "dpdro/loss.h"
#include "dpdro/lp.h"
#include "dpdro/partition.h"
#include "dpdro/separation.h"

namespace dpdro {

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stored DP constraint; source/target are -1 in the independent case.
struct Cut {
  std::int64_t phi_units = 0;
  Event event;
  int source = -1;
  int target = -1;
};

// Minimize sum_j avg_coeff(cell j) p_j over the cells of `pi`, with the
// normalization row only.
LPModel build_upper(const Partition& pi, const PrivacyBudget& budget,
                    const LossFunction& loss);

// Same over pad(pi, delta_f / beta) with inf_coeff objective.
LPModel build_lower(const Partition& pi, const PrivacyBudget& budget,
                    const LossFunction& loss);

// Row coefficients of P[X in A] - e^eps P[X in A - phi] over the cells of
// `part` (the row is <= delta).
std::vector<std::pair<int, double>> cut_row(const Partition& part, double epsilon,
                                            std::int64_t phi, const Event& a);

struct CuttingPlaneOptions {
  long max_iter = 1000000;
  double tol = 1e-9;
  // Constraints added per round (the worst ones over distinct shifts).
  int cuts_per_round = 1;
  double time_limit_seconds = 1e30;
  // Inactive rows are purged once the LP holds this many more rows than
  // after the previous purge; 0 picks n_vars / 2 + 32.
  int purge_margin = 0;
  OracleOptions oracle;
  // Cuts tried before the first solve; invalid or inactive ones are harmless.
  std::vector<Cut> seed_cuts;
  // Optional DP-feasible point over the model's cells. The oracle then runs
  // at interior_weight * interior + (1 - interior_weight) * x; every cut found
  // there also cuts off the LP optimum x, and tends to be deeper.
  std::vector<double> interior;
  double interior_weight = 0.5;
};

struct CuttingPlaneResult {
  NoiseDistribution dist;
  bool converged = false;
  bool infeasible = false;
  long iterations = 0;
  long lp_iterations = 0;
  // Shortfall of the worst constraint at the returned incumbent.
  double final_shortfall = 0;
  double seconds = 0;
  // Constraints generated in total; `pool` holds those still in the LP.
  long cuts = 0;
  std::vector<Cut> pool;
};

// Row generation over P(pi, beta) (upper) or D(pi, beta) (lower). On an
// exhausted budget the incumbent is returned with converged = false.
CuttingPlaneResult cutting_plane(BoundKind kind, const Partition& pi,
                                 const PrivacyBudget& budget,
                                 const LossFunction& loss,
                                 const CuttingPlaneOptions& opt = {});

struct BoundPair {
  NoiseDistribution upper;
  NoiseDistribution lower;
  double ub = 0;
  double lb = 0;
  double rel_gap = 0;
  std::int64_t L = 0;
  std::int64_t k = 0;
  long cuts = 0;
  double seconds = 0;
  bool converged = false;

  static double relative_gap(double ub, double lb);
};

// Both bounds on the same partition (default uniform_partition(L, k)).
BoundPair solve_pair(std::int64_t L, std::int64_t k, const PrivacyBudget& budget,
                     const LossFunction& loss,
                     const std::optional<Partition>& pi = std::nullopt,
                     const CuttingPlaneOptions& opt = {});

struct ConvergeOptions {
  // Support radius in units of delta_f; 0 starts from the truncated-Laplace
  // radius rounded up.
  std::int64_t lambda0 = 0;
  // Support growth step in units of delta_f (0: same as the start radius).
  std::int64_t lambda_step = 0;
  std::int64_t k0 = 1;
  std::int64_t max_k = 4096;
  std::int64_t max_lambda = 64;
  // Cells are split where both solutions carry the most discretization
  // slack; false doubles k everywhere instead.
  bool adaptive = true;
  // In adaptive mode, the fraction of cells split per round (largest slack
  // first).
  double split_fraction = 0.25;
  // When a level leaves the lower bound where it was, also solve the upper
  // problem on unit cells over the current support (if it has at most this
  // many cells; 0 disables). Optimal upper solutions can need fine structure
  // far from the origin that slack-driven splitting never reaches.
  std::size_t uniform_upper_cells = 400;
  double time_limit_seconds = 600;
  CuttingPlaneOptions cp;
  // Called after every solved pair.
  std::function<void(const BoundPair&)> on_step;
};

BoundPair converge(const PrivacyBudget& budget, const LossFunction& loss,
                   double target_gap, const ConvergeOptions& opt = {});

// Output cells [phi_lo + k beta, phi_lo + (k + 1) beta) for k < K.
struct OutputGrid {
  Rational phi_lo{0};
  Rational phi_hi{1};
  // Output density; default uniform on [phi_lo, phi_hi).
  std::function<double(double)> w;
};

struct DependentPair {
  DependentNoise upper;
  DependentNoise lower;
  double ub = 0;
  double lb = 0;
  double rel_gap = 0;
  long cuts = 0;
  double seconds = 0;
  bool converged = false;
};

LPModel build_dependent_upper(const Partition& pi, const PrivacyBudget& budget,
                              const LossFunction& loss,
                              const std::vector<double>& w);
LPModel build_dependent_lower(const Partition& pi, const PrivacyBudget& budget,
                              const LossFunction& loss,
                              const std::vector<double>& w_inf);

// P'(pi, beta) and D'(pi, beta) on uniform_partition(L, k).
DependentPair solve_dependent_pair(const OutputGrid& grid, std::int64_t L,
                                   std::int64_t k, const PrivacyBudget& budget,
                                   const LossFunction& loss,
                                   const std::optional<Partition>& pi = std::nullopt,
                                   const CuttingPlaneOptions& opt = {});

// Uniform mass on 2 ceil(1/(2 delta)) cells of width delta_f centred at 0;
// DP-feasible for every epsilon >= 0.
NoiseDistribution staircase(double delta, const Rational& delta_f);

// Expected loss of a piecewise-constant distribution (exact cell averages).
double expected_loss(const NoiseDistribution& p, const LossFunction& loss);

}  // namespace dpdro

#endif  // DPDRO_BOUNDS_H_
