#include "dpdro/bounds.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "dpdro/mechanisms.h"

namespace dpdro {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Adds coef * |[s, e) cap cell j| / |cell j| for every cell j of `part`.
void add_overlaps(const Partition& part, std::int64_t s, std::int64_t e,
                  double coef, int offset,
                  std::vector<std::pair<int, double>>& out) {
  const auto& b = part.breakpoints();
  s = std::max(s, b.front());
  e = std::min(e, b.back());
  if (s >= e) return;
  auto j = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), s) -
                                    b.begin() - 1);
  for (; j + 1 < b.size() && b[j] < e; ++j) {
    const std::int64_t len = std::min(e, b[j + 1]) - std::max(s, b[j]);
    if (len <= 0) continue;
    out.emplace_back(offset + static_cast<int>(j),
                     coef * static_cast<double>(len) /
                         static_cast<double>(b[j + 1] - b[j]));
  }
}

std::size_t cut_key(const Cut& c) {
  std::size_t h = c.event.hash();
  h ^= std::hash<std::int64_t>()(c.phi_units) + 0x9e3779b97f4a7c15ULL + (h << 6);
  h ^= std::hash<int>()(c.source * 7919 + c.target) + 0x9e3779b97f4a7c15ULL + (h << 6);
  return h;
}

bool same_cut(const Cut& a, const Cut& b) {
  return a.phi_units == b.phi_units && a.source == b.source &&
         a.target == b.target && a.event == b.event;
}

class CutPool {
 public:
  // Index of an equal cut, or -1.
  int find(const Cut& c) const {
    const auto it = index_.find(cut_key(c));
    if (it == index_.end()) return -1;
    for (std::size_t i : it->second) {
      if (same_cut(cuts_[i], c)) return static_cast<int>(i);
    }
    return -1;
  }
  std::size_t size() const { return cuts_.size(); }
  int insert(const Cut& c) {
    index_[cut_key(c)].push_back(cuts_.size());
    cuts_.push_back(c);
    return static_cast<int>(cuts_.size()) - 1;
  }
  const Cut& operator[](std::size_t i) const { return cuts_[i]; }

 private:
  std::vector<Cut> cuts_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> index_;
};

struct Engine {
  // Worst constraints at the LP point x with shortfall > tol (at most count)
  // and the overall worst shortfall.
  std::function<std::vector<Violation>(const std::vector<double>&, int, double,
                                       double*)>
      separate;
  std::function<std::vector<std::pair<int, double>>(const Cut&)> row;
  double delta = 0;
};

struct EngineResult {
  std::vector<double> x;
  double objective = 0;
  bool converged = false;
  bool infeasible = false;
  long iterations = 0;
  long lp_iterations = 0;
  double final_shortfall = 0;
  long cuts = 0;
  std::vector<Cut> pool;
};

Cut to_cut(const Violation& v) { return {v.phi_units, v.event, v.source, v.target}; }

EngineResult run_engine(LPModel model, const Engine& eng,
                        const CuttingPlaneOptions& opt) {
  const auto t0 = Clock::now();
  SimplexOptions so;
  so.primal_tol = std::min(1e-10, 0.1 * std::max(opt.tol, 1e-12));
  const int base_rows = model.n_rows();
  const int n_vars = model.n_vars();
  DualSimplex lp(std::move(model), so);
  CutPool pool;
  // Pool index of the cut held by LP row base_rows + i.
  std::vector<int> row_cut;
  std::vector<char> in_lp;
  const auto add = [&](int id, std::vector<std::pair<int, double>> row) {
    lp.add_row(std::move(row), Sense::kLe, eng.delta);
    row_cut.push_back(id);
    in_lp[id] = 1;
  };
  // Inactive rows are dropped once the LP grows past this size.
  const int purge_slack = opt.purge_margin > 0 ? opt.purge_margin : n_vars / 2 + 32;
  int purge_at = base_rows + purge_slack;
  EngineResult res;
  std::vector<double> interior = opt.interior;
  if (!interior.empty() && static_cast<int>(interior.size()) != n_vars) {
    throw InvalidArgument("interior point does not match the model");
  }
  // Seed cuts enter as initial rows; the first purge removes the useless ones.
  for (const Cut& c : opt.seed_cuts) {
    if (pool.find(c) >= 0) continue;
    in_lp.push_back(0);
    add(pool.insert(c), eng.row(c));
  }
  while (true) {
    const LPSolution sol = lp.solve();
    res.lp_iterations += sol.iterations;
    if (sol.status == LPStatus::kInfeasible) {
      res.infeasible = true;
      break;
    }
    if (sol.status != LPStatus::kOptimal) {
      throw NumericFailure(std::string("bounding LP is ") + to_string(sol.status));
    }
    res.x = sol.x;
    res.objective = sol.objective;
    ++res.iterations;
    if (lp.model().n_rows() > purge_at) {
      const std::vector<int> map = lp.purge_inactive(base_rows, 1e-7);
      std::vector<int> kept;
      for (std::size_t i = 0; i < row_cut.size(); ++i) {
        if (map[base_rows + i] >= 0) {
          kept.push_back(row_cut[i]);
        } else {
          in_lp[row_cut[i]] = 0;
        }
      }
      row_cut = std::move(kept);
      purge_at = lp.model().n_rows() + purge_slack;
    }
    int added = 0;
    const int count = std::max(opt.cuts_per_round, 1);
    const auto add_violations = [&](const std::vector<Violation>& viol) {
      for (const Violation& v : viol) {
        const Cut c = to_cut(v);
        int id = pool.find(c);
        if (id >= 0 && in_lp[id]) continue;
        if (id < 0) {
          in_lp.push_back(0);
          id = pool.insert(c);
        }
        add(id, eng.row(c));
        ++added;
      }
    };
    if (!interior.empty()) {
      // A cut violated at a convex combination with a feasible point is
      // violated at x as well.
      const double a = opt.interior_weight;
      std::vector<double> mid(res.x.size());
      for (std::size_t j = 0; j < mid.size(); ++j) {
        mid[j] = a * interior[j] + (1 - a) * res.x[j];
      }
      double ignored = 0;
      add_violations(eng.separate(mid, count, opt.tol, &ignored));
      if (added == 0) interior = std::move(mid);
    }
    if (added > 0) continue;
    double worst = 0;
    const auto viol = eng.separate(res.x, count, opt.tol, &worst);
    res.final_shortfall = worst;
    if (viol.empty()) {
      res.converged = true;
      break;
    }
    add_violations(viol);
    if (added == 0) {
      throw NumericFailure("oracle repeated a constraint the LP reports as satisfied");
    }
    if (res.iterations >= opt.max_iter || seconds_since(t0) > opt.time_limit_seconds) {
      break;
    }
  }
  res.cuts = static_cast<long>(pool.size());
  // Only binding rows are worth carrying to the next solve.
  for (std::size_t i = 0; i < row_cut.size(); ++i) {
    if (res.x.empty() ||
        lp.model().row_activity(base_rows + static_cast<int>(i), res.x) > eng.delta - 1e-7) {
      res.pool.push_back(pool[row_cut[i]]);
    }
  }
  return res;
}

// Mass of `p` on each cell of `to`, spreading every source cell uniformly.
// Exact when `to` refines the support of p.
std::vector<double> transfer(const NoiseDistribution& p, const Partition& to) {
  std::vector<double> out(to.n_cells(), 0.0);
  std::size_t t = 0;
  for (std::size_t j = 0; j < p.weights.size(); ++j) {
    if (p.weights[j] == 0) continue;
    const auto [a, b] = p.partition.cell(j);
    while (t < out.size() && to.cell(t).second <= a) ++t;
    for (std::size_t u = t; u < out.size(); ++u) {
      const auto [c, d] = to.cell(u);
      if (c >= b) break;
      const double len = std::min(b, d) - std::max(a, c);
      if (len > 0) out[u] += p.weights[j] * len / (b - a);
    }
  }
  return out;
}

// A feasible interior point is only useful if the mass actually fits.
bool covers(const std::vector<double>& w) {
  return std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1) < 1e-9;
}

void clean_weights(std::vector<double>& p) {
  for (double& v : p) {
    if (v < 0 && v > -1e-12) v = 0;
  }
}

}  // namespace

std::vector<std::pair<int, double>> cut_row(const Partition& part, double epsilon,
                                            std::int64_t phi, const Event& a) {
  std::vector<std::pair<int, double>> out;
  const double ee = std::exp(epsilon);
  for (const auto& [s, e] : a.segments()) add_overlaps(part, s, e, 1.0, 0, out);
  for (const auto& [s, e] : a.segments()) add_overlaps(part, s - phi, e - phi, -ee, 0, out);
  return out;
}

LPModel build_upper(const Partition& pi, const PrivacyBudget& budget,
                    const LossFunction& loss) {
  budget.validate();
  (void)pi.units_per(budget.delta_f);
  const int n = static_cast<int>(pi.n_cells());
  LPModel m(n);
  std::vector<std::pair<int, double>> norm;
  for (int j = 0; j < n; ++j) {
    const auto [a, b] = pi.cell(j);
    m.set_objective(j, loss.avg_coeff(a, b));
    norm.emplace_back(j, 1.0);
  }
  m.add_row(std::move(norm), Sense::kEq, 1.0);
  return m;
}

LPModel build_lower(const Partition& pi, const PrivacyBudget& budget,
                    const LossFunction& loss) {
  budget.validate();
  const Partition padded = pad(pi, pi.units_per(budget.delta_f));
  const int n = static_cast<int>(padded.n_cells());
  LPModel m(n);
  std::vector<std::pair<int, double>> norm;
  for (int j = 0; j < n; ++j) {
    const auto [a, b] = padded.cell(j);
    m.set_objective(j, loss.inf_coeff(a, b));
    norm.emplace_back(j, 1.0);
  }
  m.add_row(std::move(norm), Sense::kEq, 1.0);
  return m;
}

CuttingPlaneResult cutting_plane(BoundKind kind, const Partition& pi,
                                 const PrivacyBudget& budget,
                                 const LossFunction& loss,
                                 const CuttingPlaneOptions& opt) {
  if (opt.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (opt.tol < 0) throw InvalidArgument("tol must be >= 0");
  const auto t0 = Clock::now();
  const Partition part =
      kind == BoundKind::kUpper ? pi : pad(pi, pi.units_per(budget.delta_f));
  NoiseDistribution dist{part, std::vector<double>(part.n_cells(), 0.0), budget,
                         loss.name(), kind, opt.tol, 0};
  Engine eng;
  eng.delta = budget.delta;
  eng.row = [&](const Cut& c) { return cut_row(part, budget.epsilon, c.phi_units, c.event); };
  eng.separate = [&](const std::vector<double>& x, int count, double tol, double* worst) {
    dist.weights = x;
    auto v = top_shortfalls(dist, count, tol, opt.oracle);
    *worst = v.empty() ? max_shortfall(dist, opt.oracle).shortfall : v.front().shortfall;
    return v;
  };
  LPModel model = kind == BoundKind::kUpper ? build_upper(pi, budget, loss)
                                            : build_lower(pi, budget, loss);
  EngineResult er = run_engine(std::move(model), eng, opt);
  CuttingPlaneResult res;
  res.dist = dist;
  res.infeasible = er.infeasible;
  res.converged = er.converged;
  res.iterations = er.iterations;
  res.lp_iterations = er.lp_iterations;
  res.final_shortfall = er.final_shortfall;
  res.cuts = er.cuts;
  res.pool = std::move(er.pool);
  if (!er.x.empty()) {
    res.dist.weights = er.x;
    clean_weights(res.dist.weights);
  }
  res.dist.objective = er.objective;
  res.seconds = seconds_since(t0);
  return res;
}

double BoundPair::relative_gap(double ub, double lb) {
  return (ub - lb) / std::max(std::abs(lb), 1e-12);
}

BoundPair solve_pair(std::int64_t L, std::int64_t k, const PrivacyBudget& budget,
                     const LossFunction& loss, const std::optional<Partition>& pi,
                     const CuttingPlaneOptions& opt) {
  const auto t0 = Clock::now();
  const Partition part = pi ? *pi : uniform_partition(L, k, budget.delta_f);
  const CuttingPlaneResult up = cutting_plane(BoundKind::kUpper, part, budget, loss, opt);
  CuttingPlaneOptions lo_opt = opt;
  // Any DP-feasible upper solution is feasible for the lower problem too.
  if (up.converged && lo_opt.interior.empty()) {
    lo_opt.interior = transfer(up.dist, pad(part, part.units_per(budget.delta_f)));
    if (!covers(lo_opt.interior)) lo_opt.interior.clear();
  }
  const CuttingPlaneResult lo = cutting_plane(BoundKind::kLower, part, budget, loss, lo_opt);
  if (up.infeasible) {
    throw InvalidArgument("upper bounding LP is infeasible on this support");
  }
  BoundPair bp{up.dist, lo.dist};
  bp.ub = up.dist.objective;
  bp.lb = lo.dist.objective;
  bp.rel_gap = BoundPair::relative_gap(bp.ub, bp.lb);
  bp.L = L;
  bp.k = k;
  bp.cuts = up.cuts + lo.cuts;
  bp.seconds = seconds_since(t0);
  bp.converged = up.converged && lo.converged;
  return bp;
}

namespace {

// Scales every stored cut to a grid `factor` times finer.
std::vector<Cut> rescale(const std::vector<Cut>& cuts, std::int64_t factor) {
  std::vector<Cut> out;
  out.reserve(cuts.size());
  for (const Cut& c : cuts) {
    out.push_back({c.phi_units * factor, c.event.scaled(factor), c.source, c.target});
  }
  return out;
}

Partition rescale(const Partition& p, std::int64_t factor) {
  std::vector<std::int64_t> bp = p.breakpoints();
  for (auto& v : bp) v *= factor;
  return Partition(p.beta() / Rational(factor), std::move(bp));
}

// Splits the marked cells at their midpoints; all marked cells must have
// width >= 2.
Partition split_cells(const Partition& p, const std::vector<char>& mark) {
  const auto& b = p.breakpoints();
  std::vector<std::int64_t> out;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    out.push_back(b[j]);
    if (mark[j]) out.push_back(b[j] + (b[j + 1] - b[j]) / 2);
  }
  out.push_back(b.back());
  return Partition(p.beta(), std::move(out));
}

// Unit cells over the same support.
Partition unit_cells(const Partition& p) {
  std::vector<std::int64_t> bp;
  for (std::int64_t x = p.lo(); x <= p.hi(); ++x) bp.push_back(x);
  return Partition(p.beta(), std::move(bp));
}

// Extends the support by `units` on both sides using cells of width `step`.
Partition extend(const Partition& p, std::int64_t units, std::int64_t step) {
  std::vector<std::int64_t> bp;
  for (std::int64_t x = p.lo() - units; x < p.lo(); x += step) bp.push_back(x);
  bp.insert(bp.end(), p.breakpoints().begin(), p.breakpoints().end());
  for (std::int64_t x = p.hi() + step; x < p.hi() + units; x += step) bp.push_back(x);
  bp.push_back(p.hi() + units);
  return Partition(p.beta(), std::move(bp));
}

}  // namespace

BoundPair converge(const PrivacyBudget& budget, const LossFunction& loss,
                   double target_gap, const ConvergeOptions& opt) {
  if (!(target_gap > 0)) throw InvalidArgument("target gap must be positive");
  budget.validate();
  const auto t0 = Clock::now();
  std::int64_t lambda = opt.lambda0;
  if (lambda <= 0) {
    const double radius =
        budget.delta < 0.5 ? truncated_laplace(budget).bound / budget.delta_f.value()
                           : 1.0;
    lambda = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(radius - 1e-9)));
  }
  const std::int64_t lambda_step = opt.lambda_step > 0 ? opt.lambda_step : lambda;
  std::int64_t k = std::max<std::int64_t>(opt.k0, 1);
  Partition pi = uniform_partition(lambda * k, k, budget.delta_f);
  std::vector<Cut> upper_pool, lower_pool;
  BoundPair best;
  NoiseDistribution best_upper;
  bool have_best = false;
  long total_cuts = 0;
  double last_gap = kInf;
  Partition last_fine;
  while (true) {
    CuttingPlaneOptions up_opt = opt.cp, lo_opt = opt.cp;
    up_opt.seed_cuts = upper_pool;
    lo_opt.seed_cuts = lower_pool;
    const double remaining = opt.time_limit_seconds - seconds_since(t0);
    up_opt.time_limit_seconds = std::min(up_opt.time_limit_seconds, std::max(remaining, 1.0));
    if (!best_upper.weights.empty()) {
      up_opt.interior = transfer(best_upper, pi);
      if (!covers(up_opt.interior)) up_opt.interior.clear();
    }
    const CuttingPlaneResult up = cutting_plane(BoundKind::kUpper, pi, budget, loss, up_opt);
    if (up.infeasible) {
      if (lambda >= opt.max_lambda) break;
      lambda += lambda_step;
      pi = extend(pi, lambda_step * k, k);
      continue;
    }
    if (up.converged) {
      lo_opt.interior = transfer(up.dist, pad(pi, pi.units_per(budget.delta_f)));
      if (!covers(lo_opt.interior)) lo_opt.interior.clear();
    }
    lo_opt.time_limit_seconds = std::min(
        lo_opt.time_limit_seconds, std::max(opt.time_limit_seconds - seconds_since(t0), 1.0));
    const CuttingPlaneResult lo = cutting_plane(BoundKind::kLower, pi, budget, loss, lo_opt);
    upper_pool = up.pool;
    lower_pool = lo.pool;
    BoundPair bp{up.dist, lo.dist};
    bp.ub = up.dist.objective;
    bp.lb = lo.dist.objective;
    bp.rel_gap = BoundPair::relative_gap(bp.ub, bp.lb);
    bp.L = lambda * k;
    bp.k = k;
    bp.cuts = up.cuts + lo.cuts;
    bp.converged = up.converged && lo.converged && bp.rel_gap <= target_gap;
    bp.seconds = seconds_since(t0);
    if (opt.on_step) opt.on_step(bp);
    total_cuts += bp.cuts;
    const bool had_best = have_best;
    const double prev_lb = best.lb, prev_span = best.ub - best.lb;
    // Each level certifies the same optimum: keep the least upper bound from
    // a converged upper LP and the greatest lower bound (any relaxation of
    // the lower problem is valid).
    if (up.converged && (best_upper.weights.empty() || bp.ub < best.ub)) {
      best_upper = up.dist;
      best.upper = up.dist;
      best.ub = bp.ub;
      best.L = bp.L;
      best.k = bp.k;
    }
    if (!have_best || bp.lb > best.lb) {
      best.lower = lo.dist;
      best.lb = bp.lb;
      have_best = true;
    }
    if (best_upper.weights.empty()) {
      best.upper = up.dist;
      best.ub = bp.ub;
      best.L = bp.L;
      best.k = bp.k;
    }
    best.rel_gap = BoundPair::relative_gap(best.ub, best.lb);
    best.cuts = total_cuts;
    best.converged = !best_upper.weights.empty() && best.rel_gap <= target_gap;

    const Partition fine = unit_cells(pi);
    const bool lower_stalled = had_best && best.lb - prev_lb < 0.1 * prev_span;
    if (!best.converged && lower_stalled && fine.n_cells() <= opt.uniform_upper_cells &&
        fine != last_fine && seconds_since(t0) < opt.time_limit_seconds) {
      last_fine = fine;
      CuttingPlaneOptions u_opt = opt.cp;
      u_opt.seed_cuts = upper_pool;
      u_opt.time_limit_seconds = std::min(
          u_opt.time_limit_seconds, std::max(opt.time_limit_seconds - seconds_since(t0), 1.0));
      if (!best_upper.weights.empty()) {
        u_opt.interior = transfer(best_upper, fine);
        if (!covers(u_opt.interior)) u_opt.interior.clear();
      }
      const CuttingPlaneResult u = cutting_plane(BoundKind::kUpper, fine, budget, loss, u_opt);
      total_cuts += u.cuts;
      if (u.converged && (best_upper.weights.empty() || u.dist.objective < best.ub)) {
        best_upper = u.dist;
        best.upper = u.dist;
        best.ub = u.dist.objective;
        best.L = lambda * k;
        best.k = k;
      }
      best.rel_gap = BoundPair::relative_gap(best.ub, best.lb);
      best.cuts = total_cuts;
      best.converged = !best_upper.weights.empty() && best.rel_gap <= target_gap;
      if (opt.on_step) {
        BoundPair step = bp;
        step.upper = u.dist;
        step.ub = u.dist.objective;
        step.rel_gap = BoundPair::relative_gap(step.ub, step.lb);
        step.cuts = u.cuts;
        step.converged = u.converged && step.rel_gap <= target_gap;
        step.seconds = seconds_since(t0);
        opt.on_step(step);
      }
    }
    if (best.converged || seconds_since(t0) > opt.time_limit_seconds) break;
    const bool stalled = bp.rel_gap > 0.9 * last_gap;
    last_gap = bp.rel_gap;

    // Support growth: the lower bound keeps mass in the padding or the upper
    // bound leans on its outermost cells.
    const std::int64_t pad_units = k;
    const std::size_t n = pi.n_cells();
    double pad_mass = 0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(pad_units); ++j) {
      pad_mass += lo.dist.weights[j] + lo.dist.weights[lo.dist.weights.size() - 1 - j];
    }
    const double edge_mass = up.dist.weights.front() + up.dist.weights.back();
    const bool grow = stalled && (pad_mass > 1e-6 || edge_mass > 1e-6) &&
                      lambda < opt.max_lambda;
    if (grow) {
      lambda += lambda_step;
      pi = extend(pi, lambda_step * k, k);
      continue;
    }

    if (!opt.adaptive) {
      if (2 * k > opt.max_k) break;
      pi = refine(pi, 2);
      upper_pool = rescale(upper_pool, 2);
      lower_pool = rescale(lower_pool, 2);
      k *= 2;
      continue;
    }
    // Discretization slack of each cell under both solutions.
    std::vector<double> slack(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto [a, b] = pi.cell(j);
      const double gap = loss.avg_coeff(a, b) - loss.inf_coeff(a, b);
      slack[j] = gap * (up.dist.weights[j] + lo.dist.weights[j + pad_units]);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return slack[a] > slack[b]; });
    const double total = std::accumulate(slack.begin(), slack.end(), 0.0);
    std::vector<char> mark(n, 0);
    double covered = 0;
    std::size_t marked = 0;
    const auto limit = static_cast<std::size_t>(
        std::max<double>(1, opt.split_fraction * static_cast<double>(n)));
    for (std::size_t r = 0; r < n && marked < limit; ++r) {
      const std::size_t j = order[r];
      if (slack[j] <= 0 || covered >= 0.9 * total) break;
      mark[j] = 1;
      covered += slack[j];
      ++marked;
    }
    if (marked == 0) break;
    bool need_finer = false;
    for (std::size_t j = 0; j < n; ++j) need_finer = need_finer || (mark[j] && pi.width(j) < 2);
    if (need_finer) {
      if (2 * k > opt.max_k) break;
      pi = rescale(pi, 2);
      upper_pool = rescale(upper_pool, 2);
      lower_pool = rescale(lower_pool, 2);
      k *= 2;
    }
    pi = split_cells(pi, mark);
  }
  if (!have_best) {
    // No level was feasible: nothing is certified.
    best.ub = kInf;
    best.lb = -kInf;
    best.rel_gap = kInf;
    best.converged = false;
  }
  best.seconds = seconds_since(t0);
  return best;
}

LPModel build_dependent_upper(const Partition& pi, const PrivacyBudget& budget,
                              const LossFunction& loss, const std::vector<double>& w) {
  budget.validate();
  (void)pi.units_per(budget.delta_f);
  const int n = static_cast<int>(pi.n_cells());
  const int kc = static_cast<int>(w.size());
  const double beta = pi.beta().value();
  LPModel m(n * kc);
  for (int k = 0; k < kc; ++k) {
    std::vector<std::pair<int, double>> norm;
    for (int j = 0; j < n; ++j) {
      const auto [a, b] = pi.cell(j);
      m.set_objective(k * n + j, beta * w[k] * loss.avg_coeff(a, b));
      norm.emplace_back(k * n + j, 1.0);
    }
    m.add_row(std::move(norm), Sense::kEq, 1.0);
  }
  return m;
}

LPModel build_dependent_lower(const Partition& pi, const PrivacyBudget& budget,
                              const LossFunction& loss, const std::vector<double>& w_inf) {
  budget.validate();
  const Partition padded = pad(pi, pi.units_per(budget.delta_f));
  const int n = static_cast<int>(padded.n_cells());
  const int kc = static_cast<int>(w_inf.size());
  const double beta = pi.beta().value();
  LPModel m(n * kc);
  for (int k = 0; k < kc; ++k) {
    std::vector<std::pair<int, double>> norm;
    for (int j = 0; j < n; ++j) {
      const auto [a, b] = padded.cell(j);
      m.set_objective(k * n + j, beta * w_inf[k] * loss.inf_coeff(a, b));
      norm.emplace_back(k * n + j, 1.0);
    }
    m.add_row(std::move(norm), Sense::kEq, 1.0);
  }
  return m;
}

namespace {

struct DependentRun {
  DependentNoise fam;
  EngineResult er;
};

DependentRun run_dependent(BoundKind kind, const Partition& pi,
                           const PrivacyBudget& budget, const LossFunction& loss,
                           std::int64_t phi_lo, const std::vector<double>& w,
                           const CuttingPlaneOptions& opt) {
  const Partition part =
      kind == BoundKind::kUpper ? pi : pad(pi, pi.units_per(budget.delta_f));
  const int n = static_cast<int>(part.n_cells());
  const int kc = static_cast<int>(w.size());
  DependentNoise fam{part, std::vector<std::vector<double>>(kc, std::vector<double>(n, 0.0)),
                     budget, phi_lo, w, loss.name(), kind, opt.tol, 0};
  Engine eng;
  eng.delta = budget.delta;
  const double ee = std::exp(budget.epsilon);
  eng.row = [&](const Cut& c) {
    std::vector<std::pair<int, double>> out;
    for (const auto& [s, e] : c.event.segments()) {
      add_overlaps(part, s, e, 1.0, c.source * n, out);
      add_overlaps(part, s - c.phi_units, e - c.phi_units, -ee, c.target * n, out);
    }
    return out;
  };
  eng.separate = [&](const std::vector<double>& x, int count, double tol, double* worst) {
    for (int k = 0; k < kc; ++k) {
      std::copy(x.begin() + k * n, x.begin() + (k + 1) * n, fam.weights[k].begin());
    }
    auto v = top_shortfalls_dependent(fam, count, tol, opt.oracle);
    *worst = v.empty() ? max_shortfall_dependent(fam, opt.oracle).shortfall
                       : v.front().shortfall;
    return v;
  };
  LPModel model = kind == BoundKind::kUpper ? build_dependent_upper(pi, budget, loss, w)
                                            : build_dependent_lower(pi, budget, loss, w);
  DependentRun run{fam, run_engine(std::move(model), eng, opt)};
  if (!run.er.x.empty()) {
    for (int k = 0; k < kc; ++k) {
      std::copy(run.er.x.begin() + k * n, run.er.x.begin() + (k + 1) * n,
                run.fam.weights[k].begin());
      clean_weights(run.fam.weights[k]);
    }
  }
  run.fam.objective = run.er.objective;
  return run;
}

}  // namespace

DependentPair solve_dependent_pair(const OutputGrid& grid, std::int64_t L,
                                   std::int64_t k, const PrivacyBudget& budget,
                                   const LossFunction& loss,
                                   const std::optional<Partition>& pi,
                                   const CuttingPlaneOptions& opt) {
  const auto t0 = Clock::now();
  budget.validate();
  const Partition part = pi ? *pi : uniform_partition(L, k, budget.delta_f);
  const Rational beta = part.beta();
  const Rational lo_units = grid.phi_lo / beta, hi_units = grid.phi_hi / beta;
  if (lo_units.den != 1 || hi_units.den != 1 || hi_units.num <= lo_units.num) {
    throw InvalidArgument("output range is not tiled by cells of width beta");
  }
  const std::int64_t kc = hi_units.num - lo_units.num;
  const double b = beta.value();
  const double width = grid.phi_hi.value() - grid.phi_lo.value();
  std::vector<double> w(kc), w_inf(kc);
  for (std::int64_t c = 0; c < kc; ++c) {
    const double a = grid.phi_lo.value() + static_cast<double>(c) * b;
    if (!grid.w) {
      w[c] = w_inf[c] = 1.0 / width;
      continue;
    }
    constexpr int kSamples = 256;
    double sum = 0, mn = kInf;
    for (int s = 0; s <= kSamples; ++s) {
      const double v = grid.w(a + b * s / kSamples);
      if (!(v >= 0)) throw InvalidArgument("output density must be non-negative");
      sum += (s == 0 || s == kSamples ? 0.5 : 1.0) * v;
      mn = std::min(mn, v);
    }
    w[c] = sum / kSamples;
    w_inf[c] = mn;
  }
  DependentRun up = run_dependent(BoundKind::kUpper, part, budget, loss, lo_units.num, w, opt);
  DependentRun lo = run_dependent(BoundKind::kLower, part, budget, loss, lo_units.num, w_inf, opt);
  if (up.er.infeasible) {
    throw InvalidArgument("dependent upper bounding LP is infeasible on this support");
  }
  DependentPair out{up.fam, lo.fam};
  out.ub = up.fam.objective;
  out.lb = lo.fam.objective;
  out.rel_gap = BoundPair::relative_gap(out.ub, out.lb);
  out.cuts = up.er.cuts + lo.er.cuts;
  out.converged = up.er.converged && lo.er.converged;
  out.seconds = seconds_since(t0);
  return out;
}

NoiseDistribution staircase(double delta, const Rational& delta_f) {
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  const auto c = static_cast<std::int64_t>(std::ceil(1 / (2 * delta) - 1e-12));
  std::vector<std::int64_t> bp;
  for (std::int64_t i = -c; i <= c; ++i) bp.push_back(i);
  PrivacyBudget budget{1.0, delta, delta_f};
  NoiseDistribution d{Partition(delta_f, std::move(bp)),
                      std::vector<double>(static_cast<std::size_t>(2 * c),
                                          1.0 / static_cast<double>(2 * c)),
                      budget, "l1", BoundKind::kUpper, 0, 0};
  return d;
}

double expected_loss(const NoiseDistribution& p, const LossFunction& loss) {
  double s = 0;
  for (std::size_t j = 0; j < p.partition.n_cells(); ++j) {
    if (p.weights[j] == 0) continue;
    const auto [a, b] = p.partition.cell(j);
    s += p.weights[j] * loss.avg_coeff(a, b);
  }
  return s;
}

}  // namespace dpdro
