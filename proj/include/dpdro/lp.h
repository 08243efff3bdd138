#ifndef DPDRO_LP_H_
#define DPDRO_LP_H_

#include <cstddef>
#include <limits>
#include <memory>
#include <ostream>
#include <utility>
#include <vector>

namespace dpdro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kLe, kEq, kGe };
enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LPStatus s);

struct LPRow {
  std::vector<std::pair<int, double>> coefs;  // (variable, coefficient)
  Sense sense = Sense::kLe;
  double rhs = 0;
};

// minimize c'x subject to rows and lower <= x <= upper (default x >= 0).
class LPModel {
 public:
  explicit LPModel(int n_vars);

  int n_vars() const { return static_cast<int>(objective_.size()); }
  int n_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<LPRow>& rows() const { return rows_; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }

  void set_objective(int j, double c);
  void set_bounds(int j, double lo, double hi);
  // Duplicate indices are summed. Throws InvalidArgument on a bad index or a
  // non-finite coefficient.
  int add_row(std::vector<std::pair<int, double>> coefs, Sense sense,
              double rhs);

  // Keeps the rows with keep[i] != 0, in order.
  void remove_rows(const std::vector<char>& keep);

  double row_activity(int i, const std::vector<double>& x) const;
  // Largest bound or row violation of x.
  double max_violation(const std::vector<double>& x) const;

 private:
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<LPRow> rows_;
};

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  double objective = 0;
  std::vector<double> x;
  long iterations = 0;
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 80;
  long max_iterations = 2000000;
  // Box placed on unbounded variables with negative cost so that the slack
  // basis is dual feasible; hitting it reports unbounded.
  double artificial_bound = 1e9;
};

// Bounded dual simplex over an explicit dense basis inverse. Rows added after
// a solve keep the previous basis (the new slack enters it), so re-solving
// after a cut takes a few dual pivots.
class DualSimplex {
 public:
  explicit DualSimplex(LPModel model, SimplexOptions options = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;

  const LPModel& model() const;
  int add_row(std::vector<std::pair<int, double>> coefs, Sense sense,
              double rhs);
  LPSolution solve();

  // After a solve: drops the <= rows with index >= first whose slack is basic
  // and exceeds min_slack. The current basis stays optimal. Returns the new
  // index of every old row (-1 if dropped).
  std::vector<int> purge_inactive(int first, double min_slack);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot solve from the slack basis.
LPSolution solve(const LPModel& model, SimplexOptions options = {});

// CPLEX LP text format, 17 significant digits.
void write_lp(const LPModel& model, std::ostream& out);

}  // namespace dpdro

#endif  // DPDRO_LP_H_
