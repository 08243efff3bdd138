#include "dpdro/dpml.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dpdro/bounds.h"

namespace dpdro {
namespace {

using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// One CSV record; double quotes escape commas and "" is a literal quote.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InvalidArgument("unterminated quote in CSV record: " + line);
  out.push_back(trim(cur));
  return out;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Independent stream for (seed, a, b).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

// Training rows of every split (test rows are the complement).
std::vector<std::vector<std::size_t>> make_splits(std::size_t n, const EvalOptions& opt) {
  if (opt.splits < 1 || opt.simulations < 1) {
    throw InvalidArgument("splits and simulations must be positive");
  }
  if (!(opt.train_fraction > 0 && opt.train_fraction < 1)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(opt.train_fraction * n));
  if (n_train == 0 || n_train >= n) throw InvalidArgument("dataset too small to split");
  std::vector<std::vector<std::size_t>> out;
  for (int s = 0; s < opt.splits; ++s) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto gen = stream(opt.seed, static_cast<std::uint64_t>(s), ~0ULL);
    std::shuffle(idx.begin(), idx.end(), gen);
    idx.resize(n_train);
    std::sort(idx.begin(), idx.end());
    out.push_back(std::move(idx));
  }
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> out;
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r < rows.size() && rows[r] == i) {
      ++r;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// errors[split][sim] = {in-sample, out-of-sample}; splits run on `jobs`
// threads, each with its own streams, so the result does not depend on jobs.
using RunFn = std::function<std::pair<double, double>(const Dataset& train, const Dataset& test,
                                                      std::mt19937_64& gen)>;

ErrorStats run_protocol(const Dataset& d, const std::string& name, const EvalOptions& opt,
                        const RunFn& run) {
  const auto splits = make_splits(d.n(), opt);
  const int sims = opt.simulations;
  std::vector<std::vector<std::pair<double, double>>> err(
      splits.size(), std::vector<std::pair<double, double>>(sims));
  const auto work = [&](std::size_t s) {
    const Dataset train = d.subset(splits[s]);
    const Dataset test = d.subset(complement(d.n(), splits[s]));
    for (int r = 0; r < sims; ++r) {
      auto gen = stream(opt.seed, s, static_cast<std::uint64_t>(r));
      err[s][r] = run(train, test, gen);
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(splits.size())));
  if (jobs == 1) {
    for (std::size_t s = 0; s < splits.size(); ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        for (std::size_t s = j; s < splits.size(); s += jobs) work(s);
      });
    }
    for (auto& t : pool) t.join();
  }
  ErrorStats out;
  out.mechanism = name;
  std::vector<double> in_avg, out_avg, in_all, out_all;
  for (const auto& row : err) {
    double a = 0, b = 0;
    for (const auto& [i, o] : row) {
      a += i;
      b += o;
      in_all.push_back(i);
      out_all.push_back(o);
    }
    in_avg.push_back(a / sims);
    out_avg.push_back(b / sims);
  }
  out.in_sample = mean_of(in_avg);
  out.out_of_sample = mean_of(out_avg);
  const bool per_split = splits.size() > 1;
  out.in_stderr = stderr_of(per_split ? in_avg : in_all);
  out.out_stderr = stderr_of(per_split ? out_avg : out_all);
  return out;
}

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.features = features;
  out.classes = classes;
  out.x.reserve(rows.size());
  out.y.reserve(rows.size());
  for (std::size_t r : rows) {
    out.x.push_back(x.at(r));
    out.y.push_back(y.at(r));
  }
  return out;
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  return parse_dataset(read_file(csv_path), read_file(schema_path));
}

Dataset parse_dataset(const std::string& csv_text, const std::string& schema_json) {
  json schema;
  try {
    schema = json::parse(schema_json);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("schema: ") + e.what());
  }
  Dataset d;
  std::string label;
  try {
    label = schema.at("label").get<std::string>();
    for (const auto& f : schema.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      const std::string kind = f.at("kind").get<std::string>();
      if (kind == "numeric") {
        spec.kind = FeatureSpec::Kind::kNumeric;
        spec.lower = f.at("lower").get<double>();
        spec.upper = f.at("upper").get<double>();
        if (!(spec.lower < spec.upper)) {
          throw InvalidArgument("feature " + spec.name + ": lower must be below upper");
        }
      } else if (kind == "categorical") {
        spec.kind = FeatureSpec::Kind::kCategorical;
        spec.levels = f.at("levels").get<std::vector<std::string>>();
        if (spec.levels.empty()) throw InvalidArgument("feature " + spec.name + ": no levels");
      } else {
        throw InvalidArgument("feature " + spec.name + ": unknown kind " + kind);
      }
      d.features.push_back(std::move(spec));
    }
    if (schema.contains("classes")) d.classes = schema["classes"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("schema: ") + e.what());
  }

  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV has no header");
  const auto header = split_csv(line);
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("CSV lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label_col = column(label);
  std::vector<std::size_t> cols;
  for (const auto& f : d.features) cols.push_back(column(f.name));

  std::vector<std::string> labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto rec = split_csv(line);
    if (rec.size() != header.size()) {
      throw InvalidArgument("CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    for (std::size_t v = 0; v < d.features.size(); ++v) {
      const auto& f = d.features[v];
      const std::string& cell = rec[cols[v]];
      if (f.kind == FeatureSpec::Kind::kNumeric) {
        double value = 0;
        try {
          std::size_t used = 0;
          value = std::stod(cell, &used);
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw InvalidArgument("CSV line " + std::to_string(line_no) + ": " + f.name +
                                " is not numeric");
        }
        if (!std::isfinite(value)) {
          throw InvalidArgument("CSV line " + std::to_string(line_no) + ": " + f.name +
                                " is not finite");
        }
        if (value < f.lower || value > f.upper) {
          value = std::clamp(value, f.lower, f.upper);
          ++d.clamped;
        }
        row.push_back(value);
      } else {
        const auto it = std::find(f.levels.begin(), f.levels.end(), cell);
        if (it == f.levels.end()) {
          throw InvalidArgument("CSV line " + std::to_string(line_no) + ": " + f.name +
                                " has undeclared level " + cell);
        }
        row.push_back(static_cast<double>(it - f.levels.begin()));
      }
    }
    d.x.push_back(std::move(row));
    labels.push_back(rec[label_col]);
  }
  if (d.classes.empty()) {
    const std::set<std::string> distinct(labels.begin(), labels.end());
    d.classes.assign(distinct.begin(), distinct.end());
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::find(d.classes.begin(), d.classes.end(), labels[i]);
    if (it == d.classes.end()) {
      throw InvalidArgument("row " + std::to_string(i + 1) + ": undeclared class " + labels[i]);
    }
    d.y.push_back(static_cast<int>(it - d.classes.begin()));
  }
  return d;
}

Dataset synthetic_gaussians(std::size_t n, std::size_t d, double separation,
                            std::uint64_t seed) {
  if (d == 0) throw InvalidArgument("need at least one feature");
  if (!(separation >= 0)) throw InvalidArgument("separation must be non-negative");
  Dataset out;
  const double half = separation / 2, bound = half + 6;
  for (std::size_t v = 0; v < d; ++v) {
    out.features.push_back({"x" + std::to_string(v), FeatureSpec::Kind::kNumeric, -bound, bound, {}});
  }
  out.classes = {"0", "1"};
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = uniform01(gen) < 0.5 ? 0 : 1;
    std::vector<double> row;
    for (std::size_t v = 0; v < d; ++v) {
      double value = (y == 1 ? half : -half) + z(gen);
      if (value < -bound || value > bound) {
        value = std::clamp(value, -bound, bound);
        ++out.clamped;
      }
      row.push_back(value);
    }
    out.x.push_back(std::move(row));
    out.y.push_back(y);
  }
  return out;
}

double synthetic_bayes_risk(std::size_t d, double separation) {
  return norm_cdf(-std::sqrt(static_cast<double>(d)) * separation / 2);
}

NoiseModel NoiseModel::none() { return from("none", nullptr); }

NoiseModel NoiseModel::from(std::string name, Factory factory) {
  NoiseModel m;
  m.name_ = std::move(name);
  m.state_ = std::make_shared<State>();
  m.state_->factory = std::move(factory);
  return m;
}

NoiseModel NoiseModel::named(const std::string& name, double optimal_gap,
                             double optimal_seconds) {
  if (name == "none") return none();
  if (name == "laplace") return from(name, laplace);
  if (name == "gaussian") return from(name, gaussian);
  if (name == "analytic_gaussian") return from(name, analytic_gaussian);
  if (name == "truncated_laplace") return from(name, truncated_laplace);
  if (name == "optimal") {
    return from(name, [optimal_gap, optimal_seconds](const PrivacyBudget& b) {
      ConvergeOptions opt;
      opt.time_limit_seconds = optimal_seconds;
      const BoundPair bp = converge(b, LossFunction::l1(), optimal_gap, opt);
      if (bp.upper.bound != BoundKind::kUpper || !audit(bp.upper).feasible) {
        throw NumericFailure("no DP-feasible optimal distribution within the time limit");
      }
      return piecewise(bp.upper);
    });
  }
  throw InvalidArgument("unknown noise model " + name);
}

const Mechanism& NoiseModel::unit(double epsilon, double delta) const {
  if (!is_private()) throw InvalidArgument("the non-private model has no mechanism");
  std::lock_guard<std::mutex> lock(state_->mu);
  auto& slot = state_->cache[{epsilon, delta}];
  if (!slot) slot = std::make_unique<Mechanism>(state_->factory({epsilon, delta, Rational(1)}));
  return *slot;
}

double NoiseModel::draw(double sensitivity, double epsilon, double delta,
                        std::mt19937_64& gen) const {
  if (!is_private()) return 0;
  return sensitivity * sample(unit(epsilon, delta), gen);
}

std::size_t NBStatistics::n_statistics() const { return nb_sensitivities(*this).size(); }

NBStatistics nb_statistics(const Dataset& d) {
  NBStatistics s;
  s.features = d.features;
  s.classes = d.classes;
  s.n = d.n();
  const std::size_t nc = d.classes.size(), nf = d.features.size();
  s.class_counts.assign(nc, 0);
  s.level_counts.resize(nf);
  s.mean.resize(nf);
  s.stddev.resize(nf);
  for (int y : d.y) s.class_counts[y] += 1;
  for (std::size_t c = 0; c < nc; ++c) {
    if (s.class_counts[c] == 0) throw DegenerateClass("class " + d.classes[c] + " is empty");
  }
  for (std::size_t v = 0; v < nf; ++v) {
    const auto& f = d.features[v];
    if (f.kind == FeatureSpec::Kind::kCategorical) {
      s.level_counts[v].assign(nc, std::vector<double>(f.levels.size(), 0));
      for (std::size_t i = 0; i < d.n(); ++i) {
        s.level_counts[v][d.y[i]][static_cast<std::size_t>(d.x[i][v])] += 1;
      }
      continue;
    }
    std::vector<double> sum(nc, 0), sq(nc, 0);
    for (std::size_t i = 0; i < d.n(); ++i) sum[d.y[i]] += d.x[i][v];
    s.mean[v].resize(nc);
    for (std::size_t c = 0; c < nc; ++c) s.mean[v][c] = sum[c] / s.class_counts[c];
    for (std::size_t i = 0; i < d.n(); ++i) {
      const double r = d.x[i][v] - s.mean[v][d.y[i]];
      sq[d.y[i]] += r * r;
    }
    s.stddev[v].resize(nc);
    for (std::size_t c = 0; c < nc; ++c) s.stddev[v][c] = std::sqrt(sq[c] / s.class_counts[c]);
  }
  return s;
}

std::vector<double> nb_sensitivities(const NBStatistics& s) {
  std::vector<double> out(s.classes.size(), 1.0);
  for (std::size_t v = 0; v < s.features.size(); ++v) {
    const auto& f = s.features[v];
    if (f.kind == FeatureSpec::Kind::kCategorical) {
      out.insert(out.end(), f.levels.size() * s.classes.size(), 1.0);
      continue;
    }
    const double range = f.upper - f.lower;
    for (double nc : s.class_counts) out.push_back(range / nc);
    for (double nc : s.class_counts) out.push_back(range / std::sqrt(nc));
  }
  return out;
}

PrivateNBModel nb_fit_private(const NBStatistics& s, double epsilon, double delta,
                              const NoiseModel& noise, std::mt19937_64& gen) {
  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    if (!(s.class_counts[c] > 0)) throw DegenerateClass("class " + s.classes[c] + " is empty");
  }
  // Sensitivities use the true class sizes, as the statistics are defined.
  const std::vector<double> sens = nb_sensitivities(s);
  const std::size_t m = sens.size();
  PrivateNBModel out;
  out.stats = s;
  out.budget_share = Rational(1, static_cast<std::int64_t>(m));
  out.epsilon = epsilon;
  out.delta = delta;
  const double eps = epsilon / static_cast<double>(m), del = delta / static_cast<double>(m);
  if (noise.is_private()) PrivacyBudget{eps, del, Rational(1)}.validate();
  std::size_t next = 0;
  const auto perturb = [&](double& value) {
    value += noise.draw(sens[next++], eps, del, gen);
  };
  auto& t = out.stats;
  for (auto& c : t.class_counts) perturb(c);
  for (std::size_t v = 0; v < t.features.size(); ++v) {
    const auto& f = t.features[v];
    if (f.kind == FeatureSpec::Kind::kCategorical) {
      for (auto& per_class : t.level_counts[v]) {
        for (auto& c : per_class) perturb(c);
      }
      continue;
    }
    for (auto& mu : t.mean[v]) perturb(mu);
    for (auto& sd : t.stddev[v]) {
      perturb(sd);
      sd = std::max(sd, kStddevFloor * (f.upper - f.lower));
    }
  }
  return out;
}

int nb_predict(const PrivateNBModel& m, const std::vector<double>& x) {
  const auto& s = m.stats;
  if (x.size() != s.features.size()) throw InvalidArgument("feature count mismatch");
  const std::size_t nc = s.classes.size();
  // Probabilities from clipped counts, floored so noise of either sign is usable.
  const auto probability = [](double count, double total, std::size_t levels) {
    if (!(total > 0)) return std::max(1.0 / static_cast<double>(levels), kProbabilityFloor);
    return std::max(std::max(count, 0.0) / total, kProbabilityFloor);
  };
  double prior_total = 0;
  for (double c : s.class_counts) prior_total += std::max(c, 0.0);
  int best = 0;
  double best_score = -kInf;
  for (std::size_t c = 0; c < nc; ++c) {
    double score = std::log(probability(s.class_counts[c], prior_total, nc));
    for (std::size_t v = 0; v < s.features.size(); ++v) {
      const auto& f = s.features[v];
      if (f.kind == FeatureSpec::Kind::kCategorical) {
        const auto& counts = s.level_counts[v][c];
        double total = 0;
        for (double k : counts) total += std::max(k, 0.0);
        score += std::log(probability(counts[static_cast<std::size_t>(x[v])], total,
                                      counts.size()));
      } else {
        const double sd = s.stddev[v][c], z = (x[v] - s.mean[v][c]) / sd;
        score += -0.5 * z * z - std::log(sd);
      }
    }
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double prox_l1(double w, double lambda) {
  if (lambda < 0) throw InvalidArgument("lambda must be non-negative");
  if (w >= lambda) return w - lambda;
  if (w <= -lambda) return w + lambda;
  return 0;
}

int positive_class(const Dataset& d) {
  if (d.classes.size() == 2) return 1;
  std::vector<long> count(d.classes.size(), 0);
  for (int y : d.y) ++count[y];
  return static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
}

LogisticData to_logistic(const Dataset& d, int positive) {
  LogisticData out;
  const int pos = positive >= 0 ? positive : positive_class(d);
  for (std::size_t i = 0; i < d.n(); ++i) {
    std::vector<double> row;
    for (std::size_t v = 0; v < d.features.size(); ++v) {
      const auto& f = d.features[v];
      if (f.kind == FeatureSpec::Kind::kNumeric) {
        row.push_back(2 * (d.x[i][v] - f.lower) / (f.upper - f.lower) - 1);
      } else {
        for (std::size_t l = 0; l < f.levels.size(); ++l) {
          row.push_back(static_cast<std::size_t>(d.x[i][v]) == l ? 1.0 : 0.0);
        }
      }
    }
    row.push_back(1.0);
    out.x.push_back(std::move(row));
    out.y.push_back(d.y[i] == pos ? 1 : -1);
  }
  return out;
}

double logistic_objective(const LogisticData& d, const std::vector<double>& h, double lambda) {
  double loss = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double z = d.y[i] * std::inner_product(h.begin(), h.end(), d.x[i].begin(), 0.0);
    // log(1 + e^-z) without overflow.
    loss += z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  double reg = 0;
  for (double v : h) reg += std::abs(v);
  return loss / static_cast<double>(d.x.size()) + lambda * reg;
}

Hyperplane pcd_fit_private(const LogisticData& d, const NoiseModel& noise,
                           const PCDOptions& opt) {
  const std::size_t n = d.x.size(), dim = d.d();
  if (n == 0 || dim == 0) throw InvalidArgument("empty logistic problem");
  if (opt.T < 1) throw InvalidArgument("T must be positive");
  if (opt.lambda < 0) throw InvalidArgument("lambda must be non-negative");
  for (const auto& row : d.x) {
    for (double v : row) {
      if (!(std::abs(v) <= 1)) throw InvalidArgument("features must satisfy |x| <= 1");
    }
  }
  for (int y : d.y) {
    if (y != 1 && y != -1) throw InvalidArgument("labels must be +1 or -1");
  }
  const int K = opt.K > 0 ? opt.K : static_cast<int>((dim + 3) / 4);
  std::mt19937_64 gen(opt.seed);
  std::uniform_int_distribution<std::size_t> coord(0, dim - 1);
  Hyperplane out;
  out.h.resize(dim);
  for (double& v : out.h) v = 0.02 * uniform01(gen) - 0.01;
  // margin[i] = y_i h^T x_i for the current iterate.
  std::vector<double> margin(n);
  const auto margins = [&](const std::vector<double>& h) {
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] = d.y[i] * std::inner_product(h.begin(), h.end(), d.x[i].begin(), 0.0);
    }
  };
  for (int t = 0; t < opt.T; ++t) {
    std::vector<double> h = out.h, avg(dim, 0.0);
    margins(h);
    for (int k = 0; k < K; ++k) {
      const std::size_t l = coord(gen);
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        // e^-z / (1 + e^-z) = 1 / (1 + e^z).
        const double s = 1 / (1 + std::exp(margin[i]));
        sum += s * (-d.y[i] * d.x[i][l]);
      }
      if (!(std::abs(sum) < static_cast<double>(n))) {
        throw NumericFailure("gradient sum left (-n, n)");
      }
      const double z = noise.draw(2, opt.epsilon, opt.delta, gen);
      out.noise.push_back(z);
      const double next = prox_l1(h[l] - (sum + z) / static_cast<double>(n), opt.lambda);
      const double step = next - h[l];
      if (step != 0) {
        for (std::size_t i = 0; i < n; ++i) margin[i] += step * d.y[i] * d.x[i][l];
      }
      h[l] = next;
      for (std::size_t j = 0; j < dim; ++j) avg[j] += h[j];
      ++out.updates;
    }
    for (double& v : avg) v /= K;
    out.h = std::move(avg);
    if (opt.record_objective) out.objective.push_back(logistic_objective(d, out.h, opt.lambda));
  }
  return out;
}

int pcd_predict(const Hyperplane& h, const std::vector<double>& x) {
  if (x.size() != h.h.size()) throw InvalidArgument("feature count mismatch");
  return std::inner_product(h.h.begin(), h.h.end(), x.begin(), 0.0) >= 0 ? 1 : -1;
}

ErrorStats evaluate_nb(const Dataset& d, const NoiseModel& noise, double epsilon,
                       double delta, const EvalOptions& opt) {
  if (noise.is_private()) {
    // Build the (cached) mechanism once, before any worker needs it.
    const NBStatistics probe = nb_statistics(d);
    const double m = static_cast<double>(probe.n_statistics());
    (void)noise.unit(epsilon / m, delta / m);
  }
  const auto error = [](const PrivateNBModel& model, const Dataset& data) {
    long wrong = 0;
    for (std::size_t i = 0; i < data.n(); ++i) wrong += nb_predict(model, data.x[i]) != data.y[i];
    return static_cast<double>(wrong) / static_cast<double>(data.n());
  };
  ErrorStats out = run_protocol(
      d, noise.name(), opt, [&](const Dataset& train, const Dataset& test, std::mt19937_64& gen) {
        const PrivateNBModel model = nb_fit_private(nb_statistics(train), epsilon, delta, noise, gen);
        return std::make_pair(error(model, train), error(model, test));
      });
  out.total_epsilon = noise.is_private() ? epsilon : 0;
  out.total_delta = noise.is_private() ? delta : 0;
  return out;
}

ErrorStats evaluate_pcd(const Dataset& d, const NoiseModel& noise, const PCDOptions& pcd,
                        const EvalOptions& opt) {
  if (noise.is_private()) (void)noise.unit(pcd.epsilon, pcd.delta);
  const auto error = [](const Hyperplane& h, const LogisticData& data) {
    long wrong = 0;
    for (std::size_t i = 0; i < data.x.size(); ++i) wrong += pcd_predict(h, data.x[i]) != data.y[i];
    return static_cast<double>(wrong) / static_cast<double>(data.x.size());
  };
  const int pos = positive_class(d);
  ErrorStats out = run_protocol(
      d, noise.name(), opt, [&](const Dataset& train, const Dataset& test, std::mt19937_64& gen) {
        PCDOptions o = pcd;
        o.seed = gen();
        o.record_objective = false;
        const LogisticData tr = to_logistic(train, pos), te = to_logistic(test, pos);
        const Hyperplane h = pcd_fit_private(tr, noise, o);
        return std::make_pair(error(h, tr), error(h, te));
      });
  const int K = pcd.K > 0 ? pcd.K : static_cast<int>((to_logistic(d.subset({0}), pos).d() + 3) / 4);
  const double updates = static_cast<double>(pcd.T) * K;
  out.total_epsilon = noise.is_private() ? updates * pcd.epsilon : 0;
  out.total_delta = noise.is_private() ? updates * pcd.delta : 0;
  return out;
}

}  // namespace dpdro
