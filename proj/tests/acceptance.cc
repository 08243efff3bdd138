// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "dpdro/bounds.h"
#include "dpdro/dpml.h"
#include "dpdro/io.h"
#include "dpdro/mechanisms.h"
#include "oracles.h"

namespace dpdro {
namespace {

const LossFunction kL1 = LossFunction::l1();
const LossFunction kL2 = LossFunction::l2();

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(double v, int digits = 6) { return format_number(v, digits); }

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 gen(1);
  int independent = 0, dependent = 0;
  for (int rep = 0; rep < 250; ++rep) {
    const NoiseDistribution p = oracle::random_instance(gen);
    const auto ref = oracle::brute_force(p);
    const Violation v = max_shortfall(p);
    const auto [wlo, whi] = p.event_window();
    const auto units = oracle::unit_mass(p.partition, p.weights);
    const double at = oracle::shortfall(units, units, p.partition.lo(), wlo,
                                        oracle::mask_of(v.event, wlo), v.phi_units,
                                        p.budget.epsilon, p.budget.delta);
    bool inside = true;
    for (const auto& [a, b] : v.event.segments()) inside = inside && a >= wlo && b <= whi;
    independent += std::abs(v.shortfall - ref.value) <= 1e-12 && std::abs(at - ref.value) <= 1e-12 &&
                   inside;
  }
  for (int rep = 0; rep < 250; ++rep) {
    const DependentNoise f = oracle::random_family(gen);
    const auto ref = oracle::brute_force(f);
    const Violation v = max_shortfall_dependent(f);
    const auto [wlo, whi] = f.event_window();
    bool ok = std::abs(v.shortfall - ref.value) <= 1e-12 && v.source >= 0;
    if (ok) {
      const double at = oracle::shortfall(oracle::unit_mass(f.partition, f.weights[v.source]),
                                          oracle::unit_mass(f.partition, f.weights[v.target]),
                                          f.partition.lo(), wlo, oracle::mask_of(v.event, wlo),
                                          v.phi_units, f.budget.epsilon, f.budget.delta);
      ok = std::abs(at - ref.value) <= 1e-12;
    }
    dependent += ok;
  }
  o.check(independent == 250, "independent " + std::to_string(independent) + "/250");
  o.check(dependent == 250, "dependent " + std::to_string(dependent) + "/250");
  o.note("independent " + std::to_string(independent) + "/250, dependent " +
         std::to_string(dependent) + "/250 match brute force to 1e-12");
  return o;
}

Outcome weak_duality() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int pairs = 0, audited = 0;
  double worst = -kInf;
  for (double eps : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (double delta : {0.05, 0.1, 0.2, 0.3, 0.45}) {
      const PrivacyBudget b{eps, delta, Rational(1)};
      // Both supports contain the staircase, so every upper problem is feasible.
      const auto c = static_cast<std::int64_t>(std::ceil(1 / (2 * delta) - 1e-12));
      for (const LossFunction& loss : {kL1, kL2}) {
        for (int which = 0; which < 2; ++which) {
          const BoundPair bp =
              which == 0 ? solve_pair(2 * c, 2, b, loss)
                         : solve_pair(0, 0, b, loss, geometric_partition(4, 4 * c, Rational(1, 4)));
          ++pairs;
          worst = std::max(worst, bp.lb - bp.ub);
          o.check(bp.lb <= bp.ub + 1e-8, "LB > UB at " + fmt(eps) + "/" + fmt(delta));
          const bool ok = audit(bp.upper, 1e-9).feasible;
          audited += ok;
          o.check(ok, "audit at " + fmt(eps) + "/" + fmt(delta));
        }
      }
    }
  }
  const double secs = since(t0);
  o.check(secs < 120, "runtime " + fmt(secs, 3) + " s");
  o.note(std::to_string(pairs) + " pairs, max LB-UB " + fmt(worst, 3) + ", " +
         std::to_string(audited) + " audits passed, " + fmt(secs, 3) + " s");
  return o;
}

struct Converged {
  BoundPair bp;
  double seconds = 0;
};

Converged run_converge(const PrivacyBudget& b, const LossFunction& loss, double gap,
                       double limit) {
  ConvergeOptions opt;
  opt.time_limit_seconds = limit;
  opt.cp.cuts_per_round = 16;
  const auto t0 = std::chrono::steady_clock::now();
  Converged c{converge(b, loss, gap, opt), 0};
  c.seconds = since(t0);
  return c;
}

Outcome gap_target(Converged& mid) {
  Outcome o;
  double total = 0;
  for (const auto& [eps, delta] :
       std::vector<std::pair<double, double>>{{5, 0.25}, {1, 0.2}, {0.2, 0.05}}) {
    Converged c = run_converge({eps, delta, Rational(1)}, kL1, 0.01, 600);
    total += c.seconds;
    const std::string at = "(" + fmt(eps) + ", " + fmt(delta) + ")";
    o.check(c.bp.converged && c.bp.rel_gap < 0.01, at + " gap " + fmt(100 * c.bp.rel_gap, 3) + "%");
    o.note(at + ": UB " + fmt(c.bp.ub) + " LB " + fmt(c.bp.lb) + " gap " +
           fmt(100 * c.bp.rel_gap, 3) + "% in " + fmt(c.seconds, 3) + " s");
    if (eps == 1) mid = c;
  }
  o.check(total < 1800, "total runtime " + fmt(total, 3) + " s");
  o.note("total " + fmt(total, 3) + " s");
  return o;
}

Outcome example_baselines() {
  Outcome o;
  const PrivacyBudget b{1, 0.2, Rational(70, 194)};
  const double ag = 1000 * analytic_gaussian(b).stddev();
  const double tl = 1000 * truncated_laplace(b).stddev();
  o.check(std::abs(ag - 300.96) <= 0.5, "analytic Gaussian " + fmt(ag));
  o.check(std::abs(tl - 273.48) <= 0.5, "truncated Laplace " + fmt(tl));
  o.note("analytic Gaussian " + fmt(ag) + " INR, truncated Laplace " + fmt(tl) + " INR");
  // The quoted stds match a sensitivity rounded to 0.36 k INR.
  const PrivacyBudget r{1, 0.2, Rational(36, 100)};
  o.note("at delta_f = 0.36: analytic Gaussian " + fmt(1000 * analytic_gaussian(r).stddev()) +
         " INR, truncated Laplace " + fmt(1000 * truncated_laplace(r).stddev()) + " INR");
  // Soft target, report only: the l2-optimal upper distribution.
  const Converged c = run_converge(b, kL2, 0.01, 300);
  const double opt = 1000 * piecewise(c.bp.upper).stddev();
  o.note("soft: l2-optimal std " + fmt(opt) + " INR (target <= 260, gap " +
         fmt(100 * c.bp.rel_gap, 3) + "%) " + (opt <= 260 ? "met" : "missed"));
  return o;
}

Outcome table_cell(const Converged& mid) {
  Outcome o;
  const PrivacyBudget b{1, 0.2, Rational(1)};
  const double b_ub = expected_loss(truncated_laplace(b), kL1);
  const double b_lb = near_optimal_lb(b, kL1);
  const GapReport g = suboptimality_gap(b_ub, b_lb, mid.bp.ub, mid.bp.lb);
  o.check(std::abs(g.total - 32.53) <= 2, "gap " + fmt(g.total) + "%");
  o.note("B_UB " + fmt(b_ub) + ", B_LB " + fmt(b_lb) + ", UB " + fmt(mid.bp.ub) + ", LB " +
         fmt(mid.bp.lb) + ": gap " + fmt(g.total, 4) + "% (upper " + fmt(g.upper, 4) +
         ", lower " + fmt(g.lower, 4) + ")");
  return o;
}

Outcome dominance() {
  Outcome o;
  for (const auto& [eps, delta] : std::vector<std::pair<double, double>>{{5, 0.25}, {1, 0.2}}) {
    const PrivacyBudget b{eps, delta, Rational(2)};
    const double tl = expected_loss(truncated_laplace(b), kL1);
    const Converged c = run_converge(b, kL1, 0.05, 300);
    const std::string at = "(" + fmt(eps) + ", " + fmt(delta) + ")";
    o.check(c.bp.ub < tl && audit(c.bp.upper).feasible, at);
    o.note(at + ": UB " + fmt(c.bp.ub) + " vs TL " + fmt(tl));
  }
  const PrivacyBudget b{0.2, 0.05, Rational(2)};
  const double tl = expected_loss(truncated_laplace(b), kL1);
  CuttingPlaneOptions cp;
  cp.cuts_per_round = 16;
  cp.time_limit_seconds = 1200;
  const auto t0 = std::chrono::steady_clock::now();
  const DependentPair dp =
      solve_dependent_pair({Rational(0), Rational(4), nullptr}, 16, 2, b, kL1, std::nullopt, cp);
  const double secs = since(t0);
  o.check(dp.converged && dp.ub < tl && audit(dp.upper).feasible && secs < 1200,
          "dependent (0.2, 0.05)");
  o.note("(0.2, 0.05) dependent on [0, 4): UB " + fmt(dp.ub) + " vs TL " + fmt(tl) + " in " +
         fmt(secs, 3) + " s");
  return o;
}

// Error rates of two models as (mean, standard error).
bool not_worse(const ErrorStats& a, const ErrorStats& b) {
  return a.out_of_sample <= b.out_of_sample + 3 * std::hypot(a.out_stderr, b.out_stderr);
}

Outcome structure() {
  Outcome o;
  // Staircase feasibility.
  for (double delta : {0.05, 0.1, 0.3, 0.45}) {
    for (std::int64_t df : {1, 2}) {
      NoiseDistribution s = staircase(delta, Rational(df));
      for (double eps : {0.01, 1.0, 5.0}) {
        s.budget.epsilon = eps;
        o.check(audit(s).feasible, "staircase " + fmt(delta));
      }
    }
  }
  // UB(L', beta) >= UB(L' k + k - 1, beta / k).
  struct Refine {
    PrivacyBudget b;
    std::int64_t l1;
    std::int64_t k;
  };
  for (const Refine& c : {Refine{{1, 0.2, Rational(1)}, 3, 2}, Refine{{0.5, 0.1, Rational(1)}, 6, 2},
                          Refine{{2, 0.3, Rational(2)}, 2, 3}}) {
    const std::int64_t units = c.b.delta_f.num;
    const auto coarse =
        cutting_plane(BoundKind::kUpper, uniform_partition(c.l1, units, c.b.delta_f), c.b, kL1);
    const auto fine = cutting_plane(
        BoundKind::kUpper, uniform_partition(c.l1 * c.k + c.k - 1, units * c.k, c.b.delta_f), c.b,
        kL1);
    o.check(coarse.converged && fine.converged &&
                coarse.dist.objective >= fine.dist.objective - 1e-9,
            "refinement monotonicity");
  }
  // Cutting plane against the monolithic LP.
  std::mt19937_64 gen(7);
  int matched = 0, compared = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const PrivacyBudget b{std::uniform_real_distribution<double>(0.1, 2)(gen),
                          std::uniform_real_distribution<double>(0.05, 0.45)(gen), Rational(1)};
    const Rational beta(1, std::uniform_int_distribution<int>(1, 2)(gen));
    const Partition part = oracle::random_partition(gen, -3, 7, beta);
    std::vector<double> cost;
    for (std::size_t j = 0; j < part.n_cells(); ++j) {
      const auto [a, c] = part.cell(j);
      cost.push_back(kL1.avg_coeff(a, c));
    }
    const LPSolution mono = solve(oracle::monolithic(part, BoundKind::kUpper, b, cost));
    const auto cp = cutting_plane(BoundKind::kUpper, part, b, kL1);
    if (mono.status == LPStatus::kInfeasible) {
      o.check(cp.infeasible, "monolithic infeasibility");
      continue;
    }
    ++compared;
    matched += cp.converged && std::abs(cp.dist.objective - mono.objective) <= 1e-9;
  }
  o.check(matched == compared && compared > 0, "monolithic LP equivalence");
  o.note("monolithic LP matched " + std::to_string(matched) + "/" + std::to_string(compared));
  // Dependent no worse than independent when K beta >= delta_f + beta.
  {
    const PrivacyBudget b{1, 0.2, Rational(1)};
    const BoundPair ind = solve_pair(6, 2, b, kL1);
    const DependentPair dep = solve_dependent_pair({Rational(0), Rational(3, 2), nullptr}, 6, 2, b, kL1);
    o.check(dep.converged && dep.ub <= ind.ub + 1e-8, "dependent UB above independent");
    o.note("P' " + fmt(dep.ub) + " <= P " + fmt(ind.ub));
  }
  // Proximal map is non-expansive.
  for (int i = 0; i < 10000; ++i) {
    std::uniform_real_distribution<double> u(-3, 3), l(0, 2);
    const double a = u(gen), c = u(gen), lam = l(gen);
    if (std::abs(prox_l1(a, lam) - prox_l1(c, lam)) > std::abs(a - c) + 1e-15) {
      o.check(false, "prox contraction");
      break;
    }
  }
  // Zero-noise reductions.
  {
    const Dataset d = synthetic_gaussians(2000, 3, 1.0, 3);
    std::mt19937_64 g(0);
    const PrivateNBModel m = nb_fit_private(nb_statistics(d), 1, 0.1, NoiseModel::none(), g);
    const Dataset probe = synthetic_gaussians(500, 3, 1.0, 4);
    int same = 0;
    for (const auto& x : probe.x) same += nb_predict(m, x) == oracle::classical_nb(d, x);
    o.check(same == 500, "NB zero-noise reduction");
    PCDOptions p;
    p.T = 100;
    p.K = 2;
    p.lambda = 0;
    p.record_objective = true;
    const Hyperplane h = pcd_fit_private(to_logistic(d), NoiseModel::none(), p);
    bool descends = true;
    for (std::size_t t = 1; t < h.objective.size(); ++t) {
      descends = descends && h.objective[t] <= h.objective[t - 1] + 1e-6;
    }
    o.check(descends, "PCD zero-noise descent");
  }
  // Directional checks on seeded synthetic data at 3 sigma.
  {
    const Dataset d = synthetic_gaussians(1000, 1, 1.5, 9);
    EvalOptions e;
    e.splits = 5;
    e.simulations = 20;
    const ErrorStats none = evaluate_nb(d, NoiseModel::none(), 1, 0.1, e);
    const ErrorStats lap = evaluate_nb(d, NoiseModel::named("laplace"), 1, 0.1, e);
    const ErrorStats gauss = evaluate_nb(d, NoiseModel::named("gaussian"), 1, 0.1, e);
    const ErrorStats opt = evaluate_nb(d, NoiseModel::named("optimal"), 1, 0.1, e);
    o.check(not_worse(none, lap), "NB non-private vs Laplace");
    o.check(not_worse(opt, gauss), "NB optimal vs Gaussian");
    o.note("NB error none " + fmt(none.out_of_sample, 4) + ", Laplace " + fmt(lap.out_of_sample, 4) +
           ", Gaussian " + fmt(gauss.out_of_sample, 4) + ", optimal " + fmt(opt.out_of_sample, 4));
    PCDOptions p;
    p.T = 10;
    const ErrorStats pnone = evaluate_pcd(d, NoiseModel::none(), p, e);
    const ErrorStats plap = evaluate_pcd(d, NoiseModel::named("laplace"), p, e);
    o.check(not_worse(pnone, plap), "PCD non-private vs Laplace");
    o.note("PCD error none " + fmt(pnone.out_of_sample, 4) + ", Laplace " +
           fmt(plap.out_of_sample, 4));
  }
  return o;
}

void report(int n, const char* name, const std::function<Outcome()>& run, bool& all) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  all = all && o.pass;
  std::printf("%s criterion %d (%s) [%s s]: %s\n", o.pass ? "PASS" : "FAIL", n, name,
              fmt(since(t0), 3).c_str(), o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace
}  // namespace dpdro

int main() {
  using namespace dpdro;
  bool all = true;
  Converged mid;
  report(1, "oracle equivalence", oracle_equivalence, all);
  report(2, "weak duality and audit", weak_duality, all);
  report(3, "gap below 1%", [&] { return gap_target(mid); }, all);
  report(4, "example baselines", example_baselines, all);
  report(5, "suboptimality gap cell", [&] {
    if (mid.bp.L == 0) mid = run_converge({1, 0.2, Rational(1)}, kL1, 0.01, 600);
    return table_cell(mid);
  }, all);
  report(6, "dominance", dominance, all);
  report(7, "structural properties", structure, all);
  return all ? 0 : 1;
}
