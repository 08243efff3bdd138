#include "dpdro/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dpdro {
namespace {

using json = nlohmann::json;

// Rounds to `digits` significant digits so the shortest round-trip form that
// the JSON writer emits never exceeds them.
double rounded(double v, int digits = kOutputDigits) {
  if (!std::isfinite(v)) throw InvalidArgument("cannot serialize a non-finite number");
  return std::stod(format_number(v, digits));
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("JSON parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
}

template <typename F>
auto field(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Rational rational_of(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return Rational::parse(j.dump());
  throw ParseError("expected a rational number");
}

BoundKind bound_of(const std::string& s) {
  if (s == "upper") return BoundKind::kUpper;
  if (s == "lower") return BoundKind::kLower;
  throw ParseError("bound must be \"upper\" or \"lower\"");
}

void put_partition(json& j, const Partition& p) {
  j["beta_num"] = p.beta().num;
  j["beta_den"] = p.beta().den;
  j["breakpoints"] = p.breakpoints();
}

Partition get_partition(const json& j) {
  return field("partition", [&] {
    return Partition(Rational(j.at("beta_num").get<std::int64_t>(),
                              j.at("beta_den").get<std::int64_t>()),
                     j.at("breakpoints").get<std::vector<std::int64_t>>());
  });
}

void put_common(json& j, const PrivacyBudget& b, const std::string& loss, BoundKind bound,
                double tol, double objective) {
  j["epsilon"] = rounded(b.epsilon);
  j["delta"] = rounded(b.delta);
  j["delta_f"] = b.delta_f.str();
  j["loss"] = loss;
  j["bound"] = to_string(bound);
  j["certified_tol"] = rounded(tol);
  j["objective"] = rounded(objective);
}

std::vector<double> weights_of(const std::vector<double>& w) {
  std::vector<double> out;
  out.reserve(w.size());
  for (double v : w) out.push_back(rounded(v, kWeightDigits));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return std::isnan(v) ? "" : format_number(v); }

}  // namespace

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string to_json(const Partition& p) {
  json j;
  put_partition(j, p);
  return j.dump() + "\n";
}

Partition partition_from_json(const std::string& text) { return get_partition(parse(text)); }

std::string to_json(const Violation& v) {
  json j;
  j["phi_units"] = v.phi_units;
  json seg = json::array();
  for (const auto& [a, b] : v.event.segments()) seg.push_back({a, b});
  j["segments"] = seg;
  j["shortfall"] = rounded(v.shortfall);
  if (v.source >= 0) {
    j["source"] = v.source;
    j["target"] = v.target;
  }
  return j.dump() + "\n";
}

std::string to_json(const NoiseDistribution& p) {
  json j;
  put_partition(j, p.partition);
  j["weights"] = weights_of(p.weights);
  put_common(j, p.budget, p.loss, p.bound, p.certified_tol, p.objective);
  return j.dump(1) + "\n";
}

NoiseDistribution distribution_from_json(const std::string& text) {
  const json j = parse(text);
  NoiseDistribution p;
  p.partition = get_partition(j);
  field("distribution", [&] {
    p.weights = j.at("weights").get<std::vector<double>>();
    p.budget = {j.at("epsilon").get<double>(), j.at("delta").get<double>(),
                rational_of(j.at("delta_f"))};
    p.loss = j.value("loss", std::string("l1"));
    p.bound = bound_of(j.value("bound", std::string("upper")));
    p.certified_tol = j.value("certified_tol", 1e-9);
    p.objective = j.value("objective", 0.0);
    return 0;
  });
  p.budget.validate();
  if (p.weights.size() != p.partition.n_cells()) {
    throw ParseError("weights do not match the partition");
  }
  return p;
}

std::string to_json(const DependentNoise& f) {
  json j;
  put_partition(j, f.partition);
  j["phi_lo"] = f.phi_lo;
  std::vector<double> ow;
  for (double v : f.output_weights) ow.push_back(rounded(v, kWeightDigits));
  j["output_weights"] = ow;
  json w = json::array();
  for (const auto& row : f.weights) w.push_back(weights_of(row));
  j["weights"] = w;
  put_common(j, f.budget, f.loss, f.bound, f.certified_tol, f.objective);
  return j.dump(1) + "\n";
}

DependentNoise dependent_from_json(const std::string& text) {
  const json j = parse(text);
  DependentNoise f;
  f.partition = get_partition(j);
  field("dependent distribution", [&] {
    f.phi_lo = j.at("phi_lo").get<std::int64_t>();
    f.output_weights = j.at("output_weights").get<std::vector<double>>();
    f.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    f.budget = {j.at("epsilon").get<double>(), j.at("delta").get<double>(),
                rational_of(j.at("delta_f"))};
    f.loss = j.value("loss", std::string("l1"));
    f.bound = bound_of(j.value("bound", std::string("upper")));
    f.certified_tol = j.value("certified_tol", 1e-9);
    f.objective = j.value("objective", 0.0);
    return 0;
  });
  f.budget.validate();
  for (const auto& row : f.weights) {
    if (row.size() != f.partition.n_cells()) {
      throw ParseError("weights do not match the partition");
    }
  }
  if (f.output_weights.size() != f.weights.size()) {
    throw ParseError("output_weights do not match weights");
  }
  return f;
}

bool is_dependent_json(const std::string& text) {
  const json j = parse(text);
  return j.contains("weights") && j["weights"].is_array() && !j["weights"].empty() &&
         j["weights"].front().is_array();
}

std::string bound_pair_csv_header() {
  return "epsilon,delta,delta_f,loss,L,k,UB,LB,rel_gap,cuts,seconds\n";
}

std::string bound_pair_csv_row(const BoundPair& bp) {
  const auto& b = bp.upper.budget;
  std::ostringstream os;
  os << num(b.epsilon) << ',' << num(b.delta) << ',' << b.delta_f.str() << ','
     << csv_field(bp.upper.loss) << ',' << bp.L << ',' << bp.k << ',' << num(bp.ub) << ','
     << num(bp.lb) << ',' << num(bp.rel_gap) << ',' << bp.cuts << ',' << num(bp.seconds)
     << '\n';
  return os.str();
}

std::string dependent_pair_csv_header() { return bound_pair_csv_header(); }

std::string dependent_pair_csv_row(const DependentPair& dp, std::int64_t L, std::int64_t k) {
  const auto& b = dp.upper.budget;
  std::ostringstream os;
  os << num(b.epsilon) << ',' << num(b.delta) << ',' << b.delta_f.str() << ','
     << csv_field(dp.upper.loss) << ',' << L << ',' << k << ',' << num(dp.ub) << ','
     << num(dp.lb) << ',' << num(dp.rel_gap) << ',' << dp.cuts << ',' << num(dp.seconds)
     << '\n';
  return os.str();
}

std::string density_table(const NoiseDistribution& p) {
  std::ostringstream os;
  os << "midpoint,height\n";
  for (std::size_t j = 0; j < p.weights.size(); ++j) {
    const auto [a, b] = p.partition.cell(j);
    os << num(0.5 * (a + b)) << ',' << num(p.weights[j] / (b - a)) << '\n';
  }
  return os.str();
}

std::string density_table(const DependentNoise& f) {
  std::ostringstream os;
  os << "output,midpoint,height\n";
  for (std::size_t k = 0; k < f.weights.size(); ++k) {
    for (std::size_t j = 0; j < f.weights[k].size(); ++j) {
      const auto [a, b] = f.partition.cell(j);
      os << k << ',' << num(0.5 * (a + b)) << ',' << num(f.weights[k][j] / (b - a)) << '\n';
    }
  }
  return os.str();
}

std::string comparison_csv_header() {
  return "mechanism,epsilon,delta,delta_f,loss,expected_loss,std\n";
}

std::string comparison_csv_row(const ComparisonRow& r) {
  std::ostringstream os;
  os << csv_field(r.mechanism) << ',' << num(r.budget.epsilon) << ',' << num(r.budget.delta)
     << ',' << r.budget.delta_f.str() << ',' << csv_field(r.loss) << ','
     << num(r.expected_loss) << ',' << num(r.stddev) << '\n';
  return os.str();
}

std::string gap_csv_header() {
  return "epsilon,delta,delta_f,loss,UB,LB,midpoint,best_upper,B_UB,best_lower,B_LB,"
         "gap,gap_ub,gap_lb\n";
}

std::string gap_csv_row(const GapRow& r) {
  std::ostringstream os;
  os << num(r.budget.epsilon) << ',' << num(r.budget.delta) << ',' << r.budget.delta_f.str()
     << ',' << csv_field(r.loss) << ',' << num(r.ub) << ',' << num(r.lb) << ','
     << num(0.5 * (r.ub + r.lb)) << ',' << csv_field(r.best_upper) << ',' << num(r.b_ub)
     << ',' << csv_field(r.best_lower) << ',' << num(r.b_lb) << ',' << num(r.gap.total)
     << ',' << num(r.gap.upper) << ',' << num(r.gap.lower) << '\n';
  return os.str();
}

std::string results_csv(const std::vector<ErrorStats>& rows) {
  std::ostringstream os;
  os << "mechanism,in_sample,out_of_sample,stderr\n";
  for (const auto& r : rows) {
    os << csv_field(r.mechanism) << ',' << num(r.in_sample) << ',' << num(r.out_of_sample)
       << ',' << num(r.out_stderr) << '\n';
  }
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("failed writing " + path);
}

}  // namespace dpdro
