#ifndef DPDRO_PARTITION_H_
#define DPDRO_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpdro {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Positive or negative fraction num/den with den > 0, always reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double value() const { return static_cast<double>(num) / den; }
  std::string str() const;

  // Accepts "3", "-2/7", "0.125" (decimal is converted exactly).
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.1;
  Rational delta_f{1};

  // Throws InvalidArgument unless epsilon > 0, 0 < delta < 1, delta_f > 0.
  void validate() const;
};

// Cell j is [breakpoints[j] * beta, breakpoints[j + 1] * beta).
class Partition {
 public:
  // The single unit cell [0, 1) at beta = 1.
  Partition() : beta_(1), bp_{0, 1} {}
  Partition(Rational beta, std::vector<std::int64_t> breakpoints);

  const Rational& beta() const { return beta_; }
  const std::vector<std::int64_t>& breakpoints() const { return bp_; }
  std::size_t n_cells() const { return bp_.size() - 1; }
  std::int64_t lo() const { return bp_.front(); }
  std::int64_t hi() const { return bp_.back(); }
  std::int64_t width(std::size_t j) const { return bp_[j + 1] - bp_[j]; }
  std::pair<double, double> cell(std::size_t j) const;

  // Index of the cell containing unit x, or -1 outside the support.
  std::ptrdiff_t locate(std::int64_t x) const;

  // delta_f / beta as an integer; throws InvalidArgument if beta does not
  // divide delta_f.
  std::int64_t units_per(const Rational& delta_f) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Rational beta_;
  std::vector<std::int64_t> bp_;
};

// Half-open integer segments [a, b) in beta units, sorted, disjoint and with
// adjacent segments merged.
class Event {
 public:
  using Segment = std::pair<std::int64_t, std::int64_t>;

  Event() = default;
  explicit Event(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return seg_; }
  bool empty() const { return seg_.empty(); }
  std::int64_t measure_units() const;

  // Appends [a, b); requires a >= the current right end.
  void append(std::int64_t a, std::int64_t b);

  Event shifted(std::int64_t units) const;
  Event scaled(std::int64_t factor) const;
  std::size_t hash() const;

  friend bool operator==(const Event&, const Event&) = default;

 private:
  std::vector<Segment> seg_;
};

// Breakpoints -L..L+1 at beta = delta_f / k. L = 0 gives the single cell [0,1).
Partition uniform_partition(std::int64_t L, std::int64_t k,
                            const Rational& delta_f);

Partition refine(const Partition& p, std::int64_t k);

// Adds t unit cells at each end.
Partition pad(const Partition& p, std::int64_t t);

// Measure of a intersected with cell j shifted right by `shift` units, in
// beta units.
std::int64_t overlap_units(const Partition& p, std::size_t j, const Event& a,
                           std::int64_t shift);

// Same measure in query-output units.
double overlap(const Partition& p, std::size_t j, const Event& a,
               std::int64_t shift);

// Unit cells near zero, widths doubling outward. Cells of width 1 cover
// [-fine, fine); widths then double up to the support [-outer, outer).
Partition geometric_partition(std::int64_t fine, std::int64_t outer,
                              Rational beta);

}  // namespace dpdro

#endif  // DPDRO_PARTITION_H_
