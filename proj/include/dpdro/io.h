#ifndef DPDRO_IO_H_
#define DPDRO_IO_H_

#include <string>
#include <vector>

#include "dpdro/bounds.h"
#include "dpdro/distribution.h"
#include "dpdro/dpml.h"
#include "dpdro/mechanisms.h"
#include "dpdro/partition.h"
#include "dpdro/separation.h"

namespace dpdro {

// Malformed input; what() carries "line L, column C" when known.
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Fixed significant digits; weights use kWeightDigits so that a re-read
// distribution audits exactly like the written one.
inline constexpr int kOutputDigits = 12;
inline constexpr int kWeightDigits = 17;
std::string format_number(double v, int digits = kOutputDigits);

std::string to_json(const Partition& p);
Partition partition_from_json(const std::string& text);

std::string to_json(const Violation& v);

// delta_f is written as an exact rational string ("70/194").
std::string to_json(const NoiseDistribution& p);
NoiseDistribution distribution_from_json(const std::string& text);

// Adds "phi_lo" and "output_weights"; "weights" is one array per output cell.
std::string to_json(const DependentNoise& f);
DependentNoise dependent_from_json(const std::string& text);

// True when the document's "weights" is an array of arrays.
bool is_dependent_json(const std::string& text);

// epsilon,delta,delta_f,loss,L,k,UB,LB,rel_gap,cuts,seconds
std::string bound_pair_csv_header();
std::string bound_pair_csv_row(const BoundPair& bp);
std::string dependent_pair_csv_header();
std::string dependent_pair_csv_row(const DependentPair& dp, std::int64_t L, std::int64_t k);

// cell midpoint, height (mass / width), one row per cell.
std::string density_table(const NoiseDistribution& p);
std::string density_table(const DependentNoise& f);

struct ComparisonRow {
  std::string mechanism;
  PrivacyBudget budget;
  std::string loss;
  double expected_loss = 0;
  // NaN when undefined (prints as an empty field).
  double stddev = 0;
};
std::string comparison_csv_header();
std::string comparison_csv_row(const ComparisonRow& r);

struct GapRow {
  PrivacyBudget budget;
  std::string loss;
  double ub = 0;
  double lb = 0;
  std::string best_upper;
  double b_ub = 0;
  std::string best_lower;
  double b_lb = 0;
  GapReport gap;
};
std::string gap_csv_header();
std::string gap_csv_row(const GapRow& r);

// mechanism,in_sample,out_of_sample,stderr (out-of-sample standard error).
std::string results_csv(const std::vector<ErrorStats>& rows);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace dpdro

#endif  // DPDRO_IO_H_
