#ifndef DPDRO_DPML_H_
#define DPDRO_DPML_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dpdro/mechanisms.h"
#include "dpdro/separation.h"

namespace dpdro {

class DegenerateClass : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureSpec {
  enum class Kind { kNumeric, kCategorical };
  std::string name;
  Kind kind = Kind::kNumeric;
  double lower = 0;
  double upper = 1;
  std::vector<std::string> levels;
};

// Numeric entries lie in [lower, upper]; categorical entries hold the level
// index as a double.
struct Dataset {
  std::vector<FeatureSpec> features;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  // Numeric values moved onto their declared bounds during ingest.
  long clamped = 0;

  std::size_t n() const { return y.size(); }
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Headered CSV plus a schema sidecar:
//   {"label": "y", "classes": ["a", "b"],
//    "features": [{"name": "age", "kind": "numeric", "lower": 0, "upper": 99},
//                 {"name": "col", "kind": "categorical", "levels": ["r", "g"]}]}
// "classes" is optional (default: sorted distinct labels).
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);
Dataset parse_dataset(const std::string& csv_text, const std::string& schema_json);

// Equal class priors; feature v ~ N(+-separation / 2, 1) for class 1 / 0,
// clamped to +-(separation / 2 + 6).
Dataset synthetic_gaussians(std::size_t n, std::size_t d, double separation,
                            std::uint64_t seed);
// Bayes risk of the generator above (clamping ignored): Phi(-sqrt(d) sep / 2).
double synthetic_bayes_risk(std::size_t d, double separation);

// Additive noise scaled to a query's sensitivity. Every mechanism used here is
// scale-equivariant in delta_f, so one unit-sensitivity mechanism per
// (epsilon, delta) is built on first use and cached.
class NoiseModel {
 public:
  using Factory = std::function<Mechanism(const PrivacyBudget&)>;

  // Zero noise: the non-private reference.
  static NoiseModel none();
  static NoiseModel from(std::string name, Factory factory);
  // "none", "laplace", "gaussian", "analytic_gaussian", "truncated_laplace"
  // or "optimal" (l1 upper-bound distribution from converge at
  // `optimal_gap`, time-limited).
  static NoiseModel named(const std::string& name, double optimal_gap = 0.05,
                          double optimal_seconds = 120);

  const std::string& name() const { return name_; }
  bool is_private() const { return static_cast<bool>(state_->factory); }
  const Mechanism& unit(double epsilon, double delta) const;
  double draw(double sensitivity, double epsilon, double delta,
              std::mt19937_64& gen) const;

 private:
  struct State {
    Factory factory;
    std::mutex mu;
    std::map<std::pair<double, double>, std::unique_ptr<Mechanism>> cache;
  };
  std::string name_;
  std::shared_ptr<State> state_;
};

// Everything the private fit may look at.
struct NBStatistics {
  std::vector<FeatureSpec> features;
  std::vector<std::string> classes;
  std::size_t n = 0;
  std::vector<double> class_counts;
  // [feature][class][level]; empty for numeric features.
  std::vector<std::vector<std::vector<double>>> level_counts;
  // [feature][class]; empty for categorical features. Population moments.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stddev;

  std::size_t n_statistics() const;
};

NBStatistics nb_statistics(const Dataset& d);

// Sensitivity of every statistic in release order: class counts, then per
// feature either level counts (class-major) or the means followed by the stds
// of all classes.
std::vector<double> nb_sensitivities(const NBStatistics& s);

struct PrivateNBModel {
  NBStatistics stats;
  // Each statistic received budget_share * (epsilon, delta).
  Rational budget_share{1};
  double epsilon = 0;
  double delta = 0;
};

inline constexpr double kProbabilityFloor = 1e-9;
inline constexpr double kStddevFloor = 1e-6;  // times (upper - lower)

// Counts get sensitivity 1, means (u - l) / n_c and stds (u - l) / sqrt(n_c);
// every statistic gets an equal share of (epsilon, delta). Stds are floored
// after noising; counts are floored when probabilities are formed.
PrivateNBModel nb_fit_private(const NBStatistics& s, double epsilon, double delta,
                              const NoiseModel& noise, std::mt19937_64& gen);
int nb_predict(const PrivateNBModel& m, const std::vector<double>& x);

double prox_l1(double w, double lambda);

// Features mapped to [-1, 1] (numeric affinely, categorical one-hot) plus a
// constant column; labels +1 for the positive class, -1 otherwise.
struct LogisticData {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::size_t d() const { return x.empty() ? 0 : x.front().size(); }
};

// Positive class: class 1 for binary data, the most frequent class otherwise
// (pass `positive` to fix it across splits).
LogisticData to_logistic(const Dataset& d, int positive = -1);
int positive_class(const Dataset& d);

struct PCDOptions {
  int T = 100;
  int K = 0;  // 0: ceil(d / 4)
  double lambda = 1e-8;
  double epsilon = 1;
  double delta = 0.1;
  std::uint64_t seed = 1;
  bool record_objective = false;
};

struct Hyperplane {
  std::vector<double> h;
  long updates = 0;
  std::vector<double> noise;
  // Regularized objective after every iteration (if recorded).
  std::vector<double> objective;
};

// (epsilon, delta) is spent on every perturbed gradient sum.
Hyperplane pcd_fit_private(const LogisticData& d, const NoiseModel& noise,
                           const PCDOptions& opt);
int pcd_predict(const Hyperplane& h, const std::vector<double>& x);
double logistic_objective(const LogisticData& d, const std::vector<double>& h,
                          double lambda);

struct EvalOptions {
  int splits = 10;
  int simulations = 20;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct ErrorStats {
  std::string mechanism;
  double in_sample = 0;
  double out_of_sample = 0;
  // Standard errors across per-split averages (across runs for one split).
  double in_stderr = 0;
  double out_stderr = 0;
  // Naive composition total of the per-query budget.
  double total_epsilon = 0;
  double total_delta = 0;
};

ErrorStats evaluate_nb(const Dataset& d, const NoiseModel& noise, double epsilon,
                       double delta, const EvalOptions& opt);
ErrorStats evaluate_pcd(const Dataset& d, const NoiseModel& noise,
                        const PCDOptions& pcd, const EvalOptions& opt);

}  // namespace dpdro

#endif  // DPDRO_DPML_H_
