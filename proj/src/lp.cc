#include "dpdro/lp.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "dpdro/partition.h"

namespace dpdro {

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LPModel::LPModel(int n_vars)
    : objective_(static_cast<std::size_t>(std::max(n_vars, 0)), 0.0),
      lower_(objective_.size(), 0.0),
      upper_(objective_.size(), kInf) {
  if (n_vars < 1) throw InvalidArgument("LP needs at least one variable");
}

void LPModel::set_objective(int j, double c) {
  if (j < 0 || j >= n_vars()) throw InvalidArgument("objective index out of range");
  if (!std::isfinite(c)) throw InvalidArgument("objective must be finite");
  objective_[j] = c;
}

void LPModel::set_bounds(int j, double lo, double hi) {
  if (j < 0 || j >= n_vars()) throw InvalidArgument("bound index out of range");
  if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == kInf || hi == -kInf) {
    throw InvalidArgument("invalid variable bounds");
  }
  if (lo == -kInf && hi == kInf) throw InvalidArgument("free variables unsupported");
  lower_[j] = lo;
  upper_[j] = hi;
}

int LPModel::add_row(std::vector<std::pair<int, double>> coefs, Sense sense,
                     double rhs) {
  if (!std::isfinite(rhs)) throw InvalidArgument("row rhs must be finite");
  std::sort(coefs.begin(), coefs.end());
  std::vector<std::pair<int, double>> merged;
  for (const auto& [j, v] : coefs) {
    if (j < 0 || j >= n_vars()) throw InvalidArgument("row index out of range");
    if (!std::isfinite(v)) throw InvalidArgument("row coefficient must be finite");
    if (!merged.empty() && merged.back().first == j) {
      merged.back().second += v;
    } else {
      merged.emplace_back(j, v);
    }
  }
  std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
  rows_.push_back({std::move(merged), sense, rhs});
  return n_rows() - 1;
}

void LPModel::remove_rows(const std::vector<char>& keep) {
  if (keep.size() != rows_.size()) throw InvalidArgument("keep mask size mismatch");
  std::size_t out = 0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!keep[i]) continue;
    if (out != i) rows_[out] = std::move(rows_[i]);
    ++out;
  }
  rows_.resize(out);
}

double LPModel::row_activity(int i, const std::vector<double>& x) const {
  double s = 0;
  for (const auto& [j, v] : rows_[i].coefs) s += v * x[j];
  return s;
}

double LPModel::max_violation(const std::vector<double>& x) const {
  double worst = 0;
  for (int j = 0; j < n_vars(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (int i = 0; i < n_rows(); ++i) {
    const double a = row_activity(i, x), b = rows_[i].rhs;
    switch (rows_[i].sense) {
      case Sense::kLe:
        worst = std::max(worst, a - b);
        break;
      case Sense::kGe:
        worst = std::max(worst, b - a);
        break;
      case Sense::kEq:
        worst = std::max(worst, std::abs(a - b));
        break;
    }
  }
  return worst;
}

struct DualSimplex::Impl {
  LPModel model;
  SimplexOptions opt;
  int n = 0;
  int m = 0;
  // Structural columns as (row, value).
  std::vector<std::vector<std::pair<int, double>>> cols;
  // Per variable (structurals then one slack per row).
  std::vector<double> lo, up, cost, shift;
  std::vector<char> artificial, at_upper;
  std::vector<int> pos;
  std::vector<double> x, d;
  std::vector<int> basis;
  std::vector<double> rhs;
  Eigen::MatrixXd binv;
  bool initialized = false;
  long since_refactor = 0;
  long iterations = 0;
  bool bland = false;

  Impl(LPModel mdl, SimplexOptions o) : model(std::move(mdl)), opt(o) {}

  double nonbasic_value(int j) const { return at_upper[j] ? up[j] : lo[j]; }

  void push_slack(Sense sense) {
    lo.push_back(sense == Sense::kGe ? -kInf : 0.0);
    up.push_back(sense == Sense::kLe ? kInf : 0.0);
    cost.push_back(0);
    shift.push_back(0);
    artificial.push_back(0);
    at_upper.push_back(sense == Sense::kGe ? 1 : 0);
    pos.push_back(-1);
    x.push_back(0);
    d.push_back(0);
  }

  void initialize() {
    n = model.n_vars();
    m = model.n_rows();
    cols.assign(n, {});
    rhs.clear();
    for (int i = 0; i < m; ++i) {
      for (const auto& [j, v] : model.rows()[i].coefs) cols[j].emplace_back(i, v);
      rhs.push_back(model.rows()[i].rhs);
    }
    lo.assign(n, 0);
    up.assign(n, 0);
    cost.assign(n, 0);
    shift.assign(n, 0);
    artificial.assign(n, 0);
    at_upper.assign(n, 0);
    pos.assign(n, -1);
    x.assign(n, 0);
    d.assign(n, 0);
    for (int j = 0; j < n; ++j) {
      lo[j] = model.lower(j);
      up[j] = model.upper(j);
      cost[j] = model.objective()[j];
      if (cost[j] < 0 && up[j] == kInf) {
        up[j] = std::max(opt.artificial_bound, lo[j] + opt.artificial_bound);
        artificial[j] = 1;
      } else if (cost[j] > 0 && lo[j] == -kInf) {
        lo[j] = std::min(-opt.artificial_bound, up[j] - opt.artificial_bound);
        artificial[j] = 1;
      }
      if (lo[j] == -kInf) {
        at_upper[j] = 1;
      } else if (up[j] == kInf) {
        at_upper[j] = 0;
      } else {
        at_upper[j] = cost[j] < 0;
      }
      x[j] = nonbasic_value(j);
    }
    basis.assign(m, 0);
    for (int i = 0; i < m; ++i) {
      push_slack(model.rows()[i].sense);
      basis[i] = n + i;
      pos[n + i] = i;
    }
    binv = Eigen::MatrixXd::Identity(m, m);
    since_refactor = 0;
    compute_primal();
    compute_duals();
    initialized = true;
  }

  void add_row_to_basis(const LPRow& row) {
    const int i = m;
    rhs.push_back(row.rhs);
    for (const auto& [j, v] : row.coefs) cols[j].emplace_back(i, v);
    push_slack(row.sense);
    const int s = n + i;
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(m);
    double activity = 0;
    for (const auto& [j, v] : row.coefs) {
      activity += v * x[j];
      if (pos[j] >= 0) g.noalias() -= v * binv.row(pos[j]);
    }
    binv.conservativeResize(m + 1, m + 1);
    binv.row(m).head(m) = g;
    binv.col(m).head(m).setZero();
    binv(m, m) = 1;
    basis.push_back(s);
    pos[s] = m;
    x[s] = row.rhs - activity;
    d[s] = 0;
    ++m;
  }

  std::vector<int> purge_inactive(int first, double min_slack) {
    std::vector<int> map(m);
    for (int i = 0; i < m; ++i) map[i] = i;
    if (!initialized) return map;
    std::vector<char> keep(m, 1);
    int dropped = 0;
    for (int i = std::max(first, 0); i < m; ++i) {
      const int s = n + i;
      if (model.rows()[i].sense == Sense::kLe && pos[s] >= 0 && x[s] > min_slack) {
        keep[i] = 0;
        ++dropped;
      }
    }
    if (dropped == 0) return map;

    // A basic slack is a unit column of B, so deleting its row and basis
    // position leaves the inverse of the reduced basis.
    std::vector<int> keep_rows, keep_pos;
    int next = 0;
    for (int i = 0; i < m; ++i) map[i] = keep[i] ? next++ : -1;
    for (int i = 0; i < m; ++i) {
      if (keep[i]) keep_rows.push_back(i);
    }
    std::vector<char> pos_keep(m, 1);
    for (int i = 0; i < m; ++i) {
      if (!keep[i]) pos_keep[pos[n + i]] = 0;
    }
    for (int p = 0; p < m; ++p) {
      if (pos_keep[p]) keep_pos.push_back(p);
    }
    const int m2 = next;
    Eigen::MatrixXd b2(m2, m2);
    for (int c = 0; c < m2; ++c) {
      for (int r = 0; r < m2; ++r) b2(r, c) = binv(keep_pos[r], keep_rows[c]);
    }
    binv = std::move(b2);
    const auto remap = [&](auto& vec) {
      auto out = vec;
      out.resize(static_cast<std::size_t>(n + m2));
      for (int i = 0; i < m; ++i) {
        if (keep[i]) out[n + map[i]] = vec[n + i];
      }
      vec = std::move(out);
    };
    remap(lo);
    remap(up);
    remap(cost);
    remap(shift);
    remap(artificial);
    remap(at_upper);
    remap(x);
    remap(d);
    std::vector<int> basis2(m2);
    for (int r = 0; r < m2; ++r) {
      const int v = basis[keep_pos[r]];
      basis2[r] = v < n ? v : n + map[v - n];
    }
    basis = std::move(basis2);
    pos.assign(n + m2, -1);
    for (int r = 0; r < m2; ++r) pos[basis[r]] = r;
    std::vector<double> rhs2;
    for (int i : keep_rows) rhs2.push_back(rhs[i]);
    rhs = std::move(rhs2);
    model.remove_rows(keep);
    m = m2;
    cols.assign(n, {});
    for (int i = 0; i < m; ++i) {
      for (const auto& [j, v] : model.rows()[i].coefs) cols[j].emplace_back(i, v);
    }
    return map;
  }

  // a := B^{-1} A_j.
  void ftran(int j, Eigen::VectorXd& a) const {
    a.setZero(m);
    if (j >= n) {
      a = binv.col(j - n);
      return;
    }
    for (const auto& [i, v] : cols[j]) a.noalias() += v * binv.col(i);
  }

  double dot_column(const Eigen::RowVectorXd& rho, int j) const {
    if (j >= n) return rho(j - n);
    double s = 0;
    for (const auto& [i, v] : cols[j]) s += rho(i) * v;
    return s;
  }

  void compute_primal() {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r(i) = rhs[i];
    for (int j = 0; j < n + m; ++j) {
      if (pos[j] >= 0) continue;
      x[j] = nonbasic_value(j);
      if (x[j] == 0) continue;
      if (j >= n) {
        r(j - n) -= x[j];
      } else {
        for (const auto& [i, v] : cols[j]) r(i) -= v * x[j];
      }
    }
    const Eigen::VectorXd xb = binv * r;
    for (int p = 0; p < m; ++p) x[basis[p]] = xb(p);
  }

  void compute_duals() {
    Eigen::RowVectorXd cb(m);
    for (int p = 0; p < m; ++p) cb(p) = cost[basis[p]] + shift[basis[p]];
    const Eigen::RowVectorXd y = cb * binv;
    for (int j = 0; j < n + m; ++j) {
      d[j] = pos[j] >= 0 ? 0.0 : cost[j] + shift[j] - dot_column(y, j);
    }
  }

  void refactor() {
    std::vector<int> slack_pos(m, -1), structural, t_rows, t_index(m, -1);
    for (int p = 0; p < m; ++p) {
      if (basis[p] >= n) {
        slack_pos[basis[p] - n] = p;
      } else {
        structural.push_back(p);
      }
    }
    for (int i = 0; i < m; ++i) {
      if (slack_pos[i] < 0) {
        t_index[i] = static_cast<int>(t_rows.size());
        t_rows.push_back(i);
      }
    }
    const int k = static_cast<int>(structural.size());
    if (static_cast<int>(t_rows.size()) != k) throw NumericFailure("singular basis");
    Eigen::MatrixXd minv;
    if (k > 0) {
      Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(k, k);
      for (int c = 0; c < k; ++c) {
        for (const auto& [i, v] : cols[basis[structural[c]]]) {
          if (t_index[i] >= 0) mat(t_index[i], c) = v;
        }
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
      if (!(lu.rcond() > 1e-14)) {
        throw NumericFailure("basis matrix is numerically singular");
      }
      minv = lu.inverse();
    }
    binv.setZero(m, m);
    std::vector<int> s_rows, s_index(m, -1);
    for (int i = 0; i < m; ++i) {
      if (slack_pos[i] < 0) continue;
      binv(slack_pos[i], i) = 1;
      s_index[i] = static_cast<int>(s_rows.size());
      s_rows.push_back(i);
    }
    if (k > 0) {
      // Slack rows of B^-1 restricted to the T columns are -A[S, J] M^-1.
      Eigen::MatrixXd a_sj =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s_rows.size()), k);
      for (int c = 0; c < k; ++c) {
        for (const auto& [i, v] : cols[basis[structural[c]]]) {
          if (s_index[i] >= 0) a_sj(s_index[i], c) = v;
        }
      }
      const Eigen::MatrixXd prod = a_sj * minv;
      for (int t = 0; t < k; ++t) {
        for (int c = 0; c < k; ++c) binv(structural[c], t_rows[t]) = minv(c, t);
        for (std::size_t r = 0; r < s_rows.size(); ++r) {
          binv(slack_pos[s_rows[r]], t_rows[t]) = -prod(static_cast<Eigen::Index>(r), t);
        }
      }
    }
    since_refactor = 0;
    compute_primal();
    compute_duals();
  }

  void pivot(int r, int q, Eigen::VectorXd& col) {
    const double piv = col(r);
    const Eigen::RowVectorXd rr = binv.row(r) / piv;
    col(r) -= 1;
    binv.noalias() -= col * rr;
    col(r) += 1;
    const int leaving = basis[r];
    pos[leaving] = -1;
    basis[r] = q;
    pos[q] = r;
    d[q] = 0;
    ++since_refactor;
    ++iterations;
  }

  double infeasibility(int p) const {
    const int v = basis[p];
    if (x[v] < lo[v] - opt.primal_tol) return lo[v] - x[v];
    if (x[v] > up[v] + opt.primal_tol) return x[v] - up[v];
    return 0;
  }

  double objective_value() const {
    double s = 0;
    for (int j = 0; j < n + m; ++j) s += (cost[j] + shift[j]) * x[j];
    return s;
  }

  // Returns false when the dual ray proves primal infeasibility.
  bool dual_phase() {
    Eigen::VectorXd col;
    std::vector<double> alpha(n + m);
    double last_obj = -kInf;
    long stall = 0;
    while (true) {
      if (iterations > opt.max_iterations) {
        throw NumericFailure("simplex iteration limit reached");
      }
      if (since_refactor >= opt.refactor_every) refactor();
      int r = -1;
      double worst = 0;
      for (int p = 0; p < m; ++p) {
        const double inf = infeasibility(p);
        if (inf <= 0) continue;
        if (bland) {
          if (r < 0 || basis[p] < basis[r]) r = p;
        } else if (inf > worst) {
          worst = inf;
          r = p;
        }
      }
      if (r < 0) return true;
      const int v = basis[r];
      const bool to_lower = x[v] < lo[v];
      const Eigen::RowVectorXd rho = binv.row(r);
      // Harris two-pass ratio test.
      double theta_max = kInf;
      for (int j = 0; j < n + m; ++j) {
        alpha[j] = 0;
        if (pos[j] >= 0 || lo[j] == up[j]) continue;
        const double a = dot_column(rho, j);
        alpha[j] = a;
        const double signed_a = to_lower ? -a : a;
        const bool eligible = at_upper[j] ? signed_a < -opt.pivot_tol
                                          : signed_a > opt.pivot_tol;
        if (!eligible) continue;
        const double dj = at_upper[j] ? -d[j] : d[j];
        theta_max = std::min(theta_max, (std::max(dj, 0.0) + opt.dual_tol) / std::abs(a));
      }
      if (theta_max == kInf) {
        if (since_refactor > 0) {
          refactor();
          continue;
        }
        return false;
      }
      int q = -1;
      double best = 0, best_ratio = kInf;
      for (int j = 0; j < n + m; ++j) {
        const double a = alpha[j];
        if (a == 0 || pos[j] >= 0 || lo[j] == up[j]) continue;
        const double signed_a = to_lower ? -a : a;
        const bool eligible = at_upper[j] ? signed_a < -opt.pivot_tol
                                          : signed_a > opt.pivot_tol;
        if (!eligible) continue;
        const double dj = at_upper[j] ? -d[j] : d[j];
        const double ratio = std::max(dj, 0.0) / std::abs(a);
        if (ratio > theta_max) continue;
        if (bland) {
          if (ratio < best_ratio || (ratio == best_ratio && j < q)) {
            best_ratio = ratio;
            q = j;
          }
        } else if (std::abs(a) > best) {
          best = std::abs(a);
          q = j;
        }
      }
      ftran(q, col);
      if (std::abs(col(r) - alpha[q]) > 1e-7 * (1 + std::abs(alpha[q]))) {
        if (since_refactor > 0) {
          refactor();
          continue;
        }
        throw NumericFailure("pivot element mismatch after refactorization");
      }
      // Keep dual feasibility exact: a slightly infeasible d_q is shifted to 0.
      const double dq_eff = at_upper[q] ? -d[q] : d[q];
      if (dq_eff < 0) {
        shift[q] -= d[q];
        d[q] = 0;
      }
      const double theta_d = d[q] / alpha[q];
      for (int j = 0; j < n + m; ++j) {
        if (alpha[j] != 0 && pos[j] < 0) d[j] -= theta_d * alpha[j];
      }
      for (int j = 0; j < n + m; ++j) {
        if (pos[j] >= 0 || alpha[j] == 0 || lo[j] == up[j]) continue;
        const double dj = at_upper[j] ? -d[j] : d[j];
        if (dj < 0) {
          shift[j] -= d[j];
          d[j] = 0;
        }
      }
      const double bound = to_lower ? lo[v] : up[v];
      const double step = (x[v] - bound) / col(r);
      for (int p = 0; p < m; ++p) x[basis[p]] -= step * col(p);
      x[q] += step;
      x[v] = bound;
      at_upper[v] = !to_lower;
      pivot(r, q, col);
      d[v] = -theta_d;
      const double obj = objective_value();
      if (obj > last_obj + 1e-12 * (1 + std::abs(obj))) {
        last_obj = obj;
        stall = 0;
      } else if (++stall > std::max<long>(500, 4L * m)) {
        bland = true;
      }
    }
  }

  // Primal simplex from a primal feasible basis. Returns false if unbounded.
  bool primal_phase() {
    Eigen::VectorXd col;
    long stall = 0;
    double last_obj = kInf;
    bool primal_bland = false;
    while (true) {
      if (iterations > opt.max_iterations) {
        throw NumericFailure("simplex iteration limit reached");
      }
      if (since_refactor >= opt.refactor_every) refactor();
      int q = -1;
      double best = 0;
      for (int j = 0; j < n + m; ++j) {
        if (pos[j] >= 0 || lo[j] == up[j]) continue;
        const double viol = at_upper[j] ? d[j] : -d[j];
        if (viol <= opt.dual_tol) continue;
        if (primal_bland) {
          q = j;
          break;
        }
        if (viol > best) {
          best = viol;
          q = j;
        }
      }
      if (q < 0) return true;
      ftran(q, col);
      const double s = at_upper[q] ? -1.0 : 1.0;
      double t_max = kInf;
      for (int p = 0; p < m; ++p) {
        const int v = basis[p];
        const double rate = -s * col(p);
        if (rate < -opt.pivot_tol && lo[v] > -kInf) {
          t_max = std::min(t_max, (x[v] - lo[v] + opt.primal_tol) / -rate);
        } else if (rate > opt.pivot_tol && up[v] < kInf) {
          t_max = std::min(t_max, (up[v] - x[v] + opt.primal_tol) / rate);
        }
      }
      const double flip = up[q] - lo[q];
      if (t_max == kInf && flip == kInf) return false;
      int r = -1;
      double best_pivot = 0, t = 0;
      for (int p = 0; p < m; ++p) {
        const int v = basis[p];
        const double rate = -s * col(p);
        double ratio = kInf;
        if (rate < -opt.pivot_tol && lo[v] > -kInf) {
          ratio = std::max(0.0, (x[v] - lo[v]) / -rate);
        } else if (rate > opt.pivot_tol && up[v] < kInf) {
          ratio = std::max(0.0, (up[v] - x[v]) / rate);
        }
        if (ratio > t_max) continue;
        if (primal_bland ? (r < 0 || v < basis[r]) : std::abs(col(p)) > best_pivot) {
          best_pivot = std::abs(col(p));
          r = p;
          t = ratio;
        }
      }
      if (r < 0 || flip <= t) {
        for (int p = 0; p < m; ++p) x[basis[p]] -= s * flip * col(p);
        at_upper[q] = !at_upper[q];
        x[q] = nonbasic_value(q);
        ++iterations;
        continue;
      }
      const int v = basis[r];
      const bool to_lower = (-s * col(r)) < 0;
      const Eigen::RowVectorXd rho = binv.row(r);
      const double theta_d = d[q] / col(r);
      for (int j = 0; j < n + m; ++j) {
        if (pos[j] >= 0 || j == q) continue;
        const double a = dot_column(rho, j);
        if (a != 0) d[j] -= theta_d * a;
      }
      for (int p = 0; p < m; ++p) x[basis[p]] -= s * t * col(p);
      x[q] += s * t;
      x[v] = to_lower ? lo[v] : up[v];
      at_upper[v] = !to_lower;
      pivot(r, q, col);
      d[v] = -theta_d;
      const double obj = objective_value();
      if (obj < last_obj - 1e-12 * (1 + std::abs(obj))) {
        last_obj = obj;
        stall = 0;
      } else if (++stall > std::max<long>(500, 4L * m)) {
        primal_bland = true;
      }
    }
  }

  bool dual_feasible() const {
    for (int j = 0; j < n + m; ++j) {
      if (pos[j] >= 0 || lo[j] == up[j]) continue;
      const double viol = at_upper[j] ? d[j] : -d[j];
      if (viol > opt.dual_tol) return false;
    }
    return true;
  }

  LPSolution solve() {
    if (!initialized) initialize();
    bland = false;
    LPSolution sol;
    const long start = iterations;
    for (int round = 0;; ++round) {
      if (round > 50) throw NumericFailure("simplex failed to stabilize");
      if (!dual_phase()) {
        sol.status = LPStatus::kInfeasible;
        sol.iterations = iterations - start;
        return sol;
      }
      const bool shifted =
          std::any_of(shift.begin(), shift.end(), [](double v) { return v != 0.0; });
      std::fill(shift.begin(), shift.end(), 0.0);
      if (since_refactor > 0) {
        refactor();
      } else if (shifted) {
        compute_duals();
      }
      bool clean = true;
      for (int p = 0; p < m; ++p) clean = clean && infeasibility(p) == 0;
      if (!clean) continue;
      if (!dual_feasible()) {
        if (!primal_phase()) {
          sol.status = LPStatus::kUnbounded;
          sol.iterations = iterations - start;
          return sol;
        }
        refactor();
        clean = true;
        for (int p = 0; p < m; ++p) clean = clean && infeasibility(p) == 0;
        if (!clean || !dual_feasible()) continue;
      }
      break;
    }
    for (int j = 0; j < n; ++j) {
      if (!artificial[j]) continue;
      const double limit = 0.5 * opt.artificial_bound;
      if (std::abs(x[j]) >= limit) {
        sol.status = LPStatus::kUnbounded;
        sol.iterations = iterations - start;
        return sol;
      }
    }
    sol.status = LPStatus::kOptimal;
    sol.x.assign(x.begin(), x.begin() + n);
    double obj = 0;
    for (int j = 0; j < n; ++j) obj += model.objective()[j] * sol.x[j];
    sol.objective = obj;
    sol.iterations = iterations - start;
    return sol;
  }
};

DualSimplex::DualSimplex(LPModel model, SimplexOptions options)
    : impl_(std::make_unique<Impl>(std::move(model), options)) {}
DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

const LPModel& DualSimplex::model() const { return impl_->model; }

int DualSimplex::add_row(std::vector<std::pair<int, double>> coefs, Sense sense,
                         double rhs) {
  const int i = impl_->model.add_row(std::move(coefs), sense, rhs);
  if (impl_->initialized) impl_->add_row_to_basis(impl_->model.rows()[i]);
  return i;
}

LPSolution DualSimplex::solve() { return impl_->solve(); }

std::vector<int> DualSimplex::purge_inactive(int first, double min_slack) {
  return impl_->purge_inactive(first, min_slack);
}

LPSolution solve(const LPModel& model, SimplexOptions options) {
  DualSimplex s(model, options);
  return s.solve();
}

void write_lp(const LPModel& model, std::ostream& out) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto term = [&](double v, int j, bool first) {
    if (v < 0) {
      os << (first ? "-" : " - ") << -v;
    } else {
      os << (first ? "" : " + ") << v;
    }
    os << " x" << j;
  };
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < model.n_vars(); ++j) {
    if (model.objective()[j] == 0) continue;
    os << ' ';
    term(model.objective()[j], j, first);
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (int i = 0; i < model.n_rows(); ++i) {
    const auto& row = model.rows()[i];
    os << " r" << i << ":";
    bool f = true;
    for (const auto& [j, v] : row.coefs) {
      os << ' ';
      term(v, j, f);
      f = false;
    }
    if (f) os << " 0 x0";
    os << (row.sense == Sense::kLe ? " <= " : row.sense == Sense::kGe ? " >= " : " = ")
       << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < model.n_vars(); ++j) {
    const double lo = model.lower(j), hi = model.upper(j);
    if (lo == 0 && hi == kInf) continue;
    os << ' ';
    if (lo == -kInf) {
      os << "-inf";
    } else {
      os << lo;
    }
    os << " <= x" << j << " <= ";
    if (hi == kInf) {
      os << "+inf";
    } else {
      os << hi;
    }
    os << '\n';
  }
  os << "End\n";
  out << os.str();
}

}  // namespace dpdro
