// dpnoise: optimal additive noise bounds, baselines and private learners.
// Exit codes: 0 success, 1 domain failure (infeasible, not converged, bad
// input file), 2 usage.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpdro/bounds.h"
#include "dpdro/dpml.h"
#include "dpdro/io.h"
#include "dpdro/mechanisms.h"
#include "dpdro/separation.h"

namespace {

using namespace dpdro;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

int default_jobs() {
  const char* env = std::getenv("DPNOISE_JOBS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) {
    std::cerr << "warning: ignoring DPNOISE_JOBS=" << env << "\n";
    return 1;
  }
  return static_cast<int>(v);
}

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      try {
        const double v = std::stod(s);
        if (v > 0 && v < 1) return "";
      } catch (const std::exception&) {
      }
      return "must lie strictly between 0 and 1";
    },
    "(0,1)");

const CLI::Validator kRational(
    [](std::string& s) -> std::string {
      try {
        const Rational r = Rational::parse(s);
        if (r.num > 0) return "";
        return "must be positive";
      } catch (const std::exception& e) {
        return e.what();
      }
    },
    "RATIONAL");

const CLI::Validator kLossSpec(
    [](std::string& s) -> std::string {
      try {
        (void)parse_loss(s);
        return "";
      } catch (const std::exception& e) {
        return e.what();
      }
    },
    "LOSS");

struct Common {
  double epsilon = 1;
  double delta = 0.2;
  std::string delta_f = "1";
  std::string loss = "l1";
  int jobs = 1;

  void add(CLI::App* app, double default_delta = 0.2) {
    delta = default_delta;
    app->add_option("--eps", epsilon, "Privacy parameter epsilon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--delta", delta, "Privacy parameter delta")
        ->check(kOpenUnit)
        ->capture_default_str();
    app->add_option("--delta-f", delta_f, "Query sensitivity (e.g. 1, 70/194, 0.25)")
        ->check(kRational)
        ->capture_default_str();
    app->add_option("--loss", loss, "l1, l2, pinball:TAU or capped:W:S")
        ->check(kLossSpec)
        ->capture_default_str();
    app->add_option("--jobs", jobs, "Oracle worker threads (default from DPNOISE_JOBS)")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
  }
  PrivacyBudget budget() const { return {epsilon, delta, Rational::parse(delta_f)}; }
};

std::string fmt(double v) { return format_number(v); }

// ---- bounds ---------------------------------------------------------------

struct BoundsCmd {
  Common c;
  std::int64_t L = 0, k = 0;
  double target_gap = 0.01;
  double time_limit = 600;
  int cuts_per_round = 16;
  std::string out = "upper.json", lower_out, certificate = "certificate.csv",
              density = "density.csv";

  void add(CLI::App& app) {
    auto* s = app.add_subcommand("bounds", "Upper/lower bounding LPs for additive noise");
    c.add(s);
    s->add_option("--L", L, "Support radius in cells (with --k: one fixed grid)");
    s->add_option("--k", k, "Cells per delta_f (with --L)");
    s->add_option("--target-gap", target_gap, "Relative gap for adaptive refinement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--time-limit", time_limit, "Seconds for adaptive refinement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--cuts-per-round", cuts_per_round)->check(CLI::Range(1, 4096))->capture_default_str();
    s->add_option("--out", out, "Upper distribution JSON")->capture_default_str();
    s->add_option("--lower-out", lower_out, "Lower distribution JSON (optional)");
    s->add_option("--certificate", certificate, "Bound pair CSV")->capture_default_str();
    s->add_option("--density", density, "Density table CSV of the upper distribution")
        ->capture_default_str();
  }

  int run() {
    const PrivacyBudget b = c.budget();
    const LossFunction loss = parse_loss(c.loss);
    CuttingPlaneOptions cp;
    cp.cuts_per_round = cuts_per_round;
    cp.oracle.jobs = c.jobs;
    BoundPair bp;
    bool ok = false;
    if (L > 0 || k > 0) {
      if (L < 0 || k < 1) throw CLI::ValidationError("--L and --k must be given together");
      bp = solve_pair(L, k, b, loss, std::nullopt, cp);
      ok = bp.converged;
    } else {
      ConvergeOptions opt;
      opt.cp = cp;
      opt.time_limit_seconds = time_limit;
      bp = converge(b, loss, target_gap, opt);
      ok = bp.converged;
    }
    write_text(out, to_json(bp.upper));
    if (!lower_out.empty()) write_text(lower_out, to_json(bp.lower));
    write_text(certificate, bound_pair_csv_header() + bound_pair_csv_row(bp));
    write_text(density, density_table(bp.upper));
    std::cout << bound_pair_csv_header() << bound_pair_csv_row(bp);
    if (!ok) std::cerr << "not converged: rel_gap " << fmt(bp.rel_gap) << "\n";
    return ok ? kOk : kDomain;
  }
};

// ---- bounds-dep -----------------------------------------------------------

struct BoundsDepCmd {
  Common c;
  std::string phi_lo = "0", phi_hi = "4";
  std::int64_t L = 4, k = 1;
  double time_limit = 1200;
  int cuts_per_round = 16;
  std::string out = "upper_dep.json", lower_out, certificate = "certificate_dep.csv",
              density = "density_dep.csv";

  void add(CLI::App& app) {
    auto* s = app.add_subcommand("bounds-dep", "Bounding LPs for output-dependent noise");
    c.add(s);
    s->add_option("--phi-lo", phi_lo, "Lower end of the output range")->capture_default_str();
    s->add_option("--phi-hi", phi_hi, "Upper end of the output range")->capture_default_str();
    s->add_option("--L", L, "Support radius in cells")->check(CLI::NonNegativeNumber)->capture_default_str();
    s->add_option("--k", k, "Cells per delta_f")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--time-limit", time_limit)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--cuts-per-round", cuts_per_round)->check(CLI::Range(1, 4096))->capture_default_str();
    s->add_option("--out", out)->capture_default_str();
    s->add_option("--lower-out", lower_out);
    s->add_option("--certificate", certificate)->capture_default_str();
    s->add_option("--density", density)->capture_default_str();
  }

  int run() {
    const PrivacyBudget b = c.budget();
    OutputGrid grid;
    grid.phi_lo = Rational::parse(phi_lo);
    grid.phi_hi = Rational::parse(phi_hi);
    CuttingPlaneOptions cp;
    cp.cuts_per_round = cuts_per_round;
    cp.time_limit_seconds = time_limit;
    cp.oracle.jobs = c.jobs;
    const DependentPair dp = solve_dependent_pair(grid, L, k, b, parse_loss(c.loss),
                                                  std::nullopt, cp);
    write_text(out, to_json(dp.upper));
    if (!lower_out.empty()) write_text(lower_out, to_json(dp.lower));
    write_text(certificate, dependent_pair_csv_header() + dependent_pair_csv_row(dp, L, k));
    write_text(density, density_table(dp.upper));
    std::cout << dependent_pair_csv_header() << dependent_pair_csv_row(dp, L, k);
    if (!dp.converged) std::cerr << "not converged within the time limit\n";
    return dp.converged ? kOk : kDomain;
  }
};

// ---- compare --------------------------------------------------------------

struct CompareCmd {
  std::string grid = "1:0.2";
  std::string delta_f = "1";
  std::string loss = "l1";
  std::int64_t L = 0, k = 0;
  double target_gap = 0.01;
  double time_limit = 600;
  int jobs = 1;
  std::string out = "comparison.csv", gaps = "gaps.csv";

  void add(CLI::App& app) {
    auto* s = app.add_subcommand("compare", "Baselines against the optimal bound pair");
    s->add_option("--grid", grid, "Comma-separated eps:delta pairs; empty for none")
        ->capture_default_str();
    s->add_option("--delta-f", delta_f)->check(kRational)->capture_default_str();
    s->add_option("--loss", loss)->check(kLossSpec)->capture_default_str();
    s->add_option("--L", L, "Fixed grid radius (with --k) instead of refinement");
    s->add_option("--k", k);
    s->add_option("--target-gap", target_gap)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--time-limit", time_limit, "Seconds per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--jobs", jobs)->check(CLI::Range(1, 1024))->capture_default_str();
    s->add_option("--out", out, "Per-mechanism CSV")->capture_default_str();
    s->add_option("--gaps", gaps, "Suboptimality CSV")->capture_default_str();
  }

  std::vector<std::pair<double, double>> points() const {
    std::vector<std::pair<double, double>> out_pts;
    std::stringstream ss(grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw CLI::ValidationError("--grid", "expected eps:delta");
      double e = 0, d = 0;
      try {
        e = std::stod(item.substr(0, colon));
        d = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "bad number in " + item);
      }
      if (!(e > 0) || !(d > 0 && d < 1)) {
        throw CLI::ValidationError("--grid", "need eps > 0 and 0 < delta < 1 in " + item);
      }
      out_pts.emplace_back(e, d);
    }
    return out_pts;
  }

  int run() {
    const auto pts = points();
    if ((L > 0) != (k > 0)) throw CLI::ValidationError("--L and --k must be given together");
    const LossFunction lf = parse_loss(loss);
    const LossFunction l2 = LossFunction::l2();
    std::string rows = comparison_csv_header(), gap_rows = gap_csv_header();
    bool ok = true;
    for (const auto& [e, d] : pts) {
      const PrivacyBudget b{e, d, Rational::parse(delta_f)};
      std::string best_upper;
      double b_ub = kInf;
      for (auto make : {laplace, gaussian, analytic_gaussian, truncated_laplace}) {
        Mechanism m;
        try {
          m = make(b);
        } catch (const InvalidArgument&) {
          continue;  // outside the construction's range (e.g. delta >= 1/2)
        }
        const double el = expected_loss(m, lf);
        rows += comparison_csv_row({m.name(), b, loss, el, m.stddev()});
        if (m.valid && el < b_ub) {
          b_ub = el;
          best_upper = m.name();
        }
      }
      double b_lb = std::nan("");
      try {
        b_lb = near_optimal_lb(b, lf);
        double sd = std::nan("");
        try {
          sd = std::sqrt(near_optimal_lb(b, l2));
        } catch (const InvalidArgument&) {
        }
        rows += comparison_csv_row({"near_optimal_lb", b, loss, b_lb, sd});
      } catch (const InvalidArgument&) {
      }
      CuttingPlaneOptions cp;
      cp.cuts_per_round = 16;
      cp.oracle.jobs = jobs;
      BoundPair bp;
      if (L > 0) {
        bp = solve_pair(L, k, b, lf, std::nullopt, cp);
      } else {
        ConvergeOptions opt;
        opt.cp = cp;
        opt.time_limit_seconds = time_limit;
        bp = converge(b, lf, target_gap, opt);
      }
      ok = ok && bp.converged;
      rows += comparison_csv_row(
          {"optimal_upper", b, loss, bp.ub, std::sqrt(expected_loss(bp.upper, l2))});
      rows += comparison_csv_row({"optimal_lower", b, loss, bp.lb, std::nan("")});
      GapRow g{b, loss, bp.ub, bp.lb, best_upper, b_ub, "near_optimal_lb", b_lb, {}};
      if (std::isfinite(b_ub) && std::isfinite(b_lb) && b_ub >= b_lb) {
        g.gap = suboptimality_gap(b_ub, b_lb, bp.ub, bp.lb);
      } else {
        g.gap = {std::nan(""), std::nan(""), std::nan("")};
      }
      gap_rows += gap_csv_row(g);
    }
    write_text(out, rows);
    write_text(gaps, gap_rows);
    std::cout << gap_rows;
    if (!ok) std::cerr << "some optimal bound pairs did not reach the target gap\n";
    return ok ? kOk : kDomain;
  }
};

// ---- audit / sample -------------------------------------------------------

struct AuditCmd {
  std::string path;
  double tol = 1e-9;
  int jobs = 1;

  void add(CLI::App& app) {
    auto* s = app.add_subcommand("audit", "Check a distribution file for (eps, delta)-DP");
    s->add_option("file", path, "Distribution JSON")->required();
    s->add_option("--tol", tol)->check(CLI::NonNegativeNumber)->capture_default_str();
    s->add_option("--jobs", jobs)->check(CLI::Range(1, 1024))->capture_default_str();
  }

  int run() {
    const std::string text = read_text(path);
    OracleOptions o;
    o.jobs = jobs;
    AuditResult r;
    if (is_dependent_json(text)) {
      r = audit(dependent_from_json(text), tol, o);
    } else {
      const NoiseDistribution p = distribution_from_json(text);
      p.validate(1e-6);
      r = audit(p, tol, o);
    }
    std::cout << to_json(r.worst);
    if (!r.feasible) {
      std::cerr << "infeasible: worst shortfall " << fmt(r.worst.shortfall) << " at shift "
                << r.worst.phi_units << " units\n";
    }
    return r.feasible ? kOk : kDomain;
  }
};

struct SampleCmd {
  std::string path;
  long n = 10;
  std::uint64_t seed = 1;
  int output = -1;

  void add(CLI::App& app) {
    auto* s = app.add_subcommand("sample", "Draw noise from a distribution file");
    s->add_option("file", path, "Distribution JSON")->required();
    s->add_option("--n", n, "Number of draws")->check(CLI::NonNegativeNumber)->capture_default_str();
    s->add_option("--seed", seed)->capture_default_str();
    s->add_option("--output", output, "Output cell for a dependent distribution");
  }

  int run() {
    const std::string text = read_text(path);
    NoiseDistribution p;
    if (is_dependent_json(text)) {
      const DependentNoise f = dependent_from_json(text);
      if (output < 0 || output >= static_cast<int>(f.n_outputs())) {
        throw CLI::ValidationError("--output", "required for dependent noise, 0.." +
                                                   std::to_string(f.n_outputs() - 1));
      }
      p = {f.partition, f.weights[output], f.budget, f.loss, f.bound, f.certified_tol, 0};
    } else {
      p = distribution_from_json(text);
    }
    const Mechanism m = piecewise(p);
    std::mt19937_64 gen(seed);
    std::string buf;
    for (long i = 0; i < n; ++i) {
      buf += fmt(sample(m, gen));
      buf += '\n';
    }
    std::cout << buf;
    return kOk;
  }
};

// ---- nb / pcd -------------------------------------------------------------

struct LearnCmd {
  bool is_pcd = false;
  std::string data, schema;
  std::size_t synthetic_n = 2000, synthetic_d = 1;
  double separation = 2;
  std::string mechanisms = "none,gaussian,analytic_gaussian,truncated_laplace,optimal";
  double epsilon = 1, delta = 0.1;
  int splits = 10, sims = 20;
  std::uint64_t seed = 1;
  int jobs = 1;
  double optimal_gap = 0.05, optimal_seconds = 120;
  int T = 100, K = 0;
  double lambda = 1e-8;
  std::string out;

  void add(CLI::App& app, bool pcd) {
    is_pcd = pcd;
    out = pcd ? "pcd_results.csv" : "nb_results.csv";
    auto* s = pcd ? app.add_subcommand("pcd", "Private proximal coordinate descent")
                  : app.add_subcommand("nb", "Private naive Bayes");
    s->add_option("--data", data, "Headered CSV (needs --schema)");
    s->add_option("--schema", schema, "Schema JSON sidecar");
    s->add_option("--synthetic-n", synthetic_n, "Synthetic rows when no --data")->capture_default_str();
    s->add_option("--synthetic-d", synthetic_d, "Synthetic features")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--separation", separation, "Synthetic class separation")->capture_default_str();
    s->add_option("--mechanisms", mechanisms, "Comma-separated noise models")->capture_default_str();
    s->add_option("--eps", epsilon)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--delta", delta)->check(kOpenUnit)->capture_default_str();
    s->add_option("--splits", splits)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--sims", sims)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", seed)->capture_default_str();
    s->add_option("--jobs", jobs)->check(CLI::Range(1, 1024))->capture_default_str();
    s->add_option("--optimal-gap", optimal_gap)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--optimal-seconds", optimal_seconds)->check(CLI::PositiveNumber)->capture_default_str();
    if (pcd) {
      s->add_option("--T", T, "Iterations")->check(CLI::PositiveNumber)->capture_default_str();
      s->add_option("--K", K, "Coordinates per iteration (0: ceil(d/4))")
          ->check(CLI::NonNegativeNumber)
          ->capture_default_str();
      s->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber)->capture_default_str();
    }
    s->add_option("--out", out, "Results CSV")->capture_default_str();
  }

  int run() {
    if (data.empty() != schema.empty()) {
      throw CLI::ValidationError("--data and --schema must be given together");
    }
    Dataset d = data.empty() ? synthetic_gaussians(synthetic_n, synthetic_d, separation, seed)
                             : load_dataset(data, schema);
    if (d.clamped > 0) std::cerr << "clamped " << d.clamped << " values onto declared bounds\n";
    EvalOptions eo;
    eo.splits = splits;
    eo.simulations = sims;
    eo.seed = seed;
    eo.jobs = jobs;
    std::vector<ErrorStats> rows;
    std::stringstream ss(mechanisms);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      const NoiseModel noise = NoiseModel::named(name, optimal_gap, optimal_seconds);
      if (is_pcd) {
        PCDOptions po;
        po.T = T;
        po.K = K;
        po.lambda = lambda;
        po.epsilon = epsilon;
        po.delta = delta;
        rows.push_back(evaluate_pcd(d, noise, po, eo));
      } else {
        rows.push_back(evaluate_nb(d, noise, epsilon, delta, eo));
      }
      const auto& r = rows.back();
      if (noise.is_private()) {
        std::cerr << r.mechanism << ": naive composition total (eps, delta) = ("
                  << fmt(r.total_epsilon) << ", " << fmt(r.total_delta) << ")"
                  << (is_pcd ? ", per-update budget" : ", split equally over statistics")
                  << "\n";
      }
    }
    const std::string csv = results_csv(rows);
    write_text(out, csv);
    std::cout << csv;
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal additive noise for (epsilon, delta)-differential privacy"};
  app.set_config("--config", "", "Read options from a TOML file");
  std::string save_config;
  app.add_option("--save-config", save_config, "Write the resolved options as TOML");
  app.require_subcommand(1);
  const int jobs = default_jobs();

  BoundsCmd bounds;
  BoundsDepCmd bounds_dep;
  CompareCmd compare;
  AuditCmd audit_cmd;
  SampleCmd sample_cmd;
  LearnCmd nb, pcd;
  bounds.c.jobs = bounds_dep.c.jobs = compare.jobs = audit_cmd.jobs = nb.jobs = pcd.jobs = jobs;
  bounds.add(app);
  bounds_dep.add(app);
  compare.add(app);
  audit_cmd.add(app);
  sample_cmd.add(app);
  nb.add(app, false);
  pcd.add(app, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    if (!save_config.empty()) write_text(save_config, app.config_to_str(true, false));
    if (app.got_subcommand("bounds")) return bounds.run();
    if (app.got_subcommand("bounds-dep")) return bounds_dep.run();
    if (app.got_subcommand("compare")) return compare.run();
    if (app.got_subcommand("audit")) return audit_cmd.run();
    if (app.got_subcommand("sample")) return sample_cmd.run();
    if (app.got_subcommand("nb")) return nb.run();
    if (app.got_subcommand("pcd")) return pcd.run();
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}
