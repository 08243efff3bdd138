#include "dpdro/partition.h"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>

namespace dpdro {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw InvalidArgument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = g == 0 ? 0 : n / g;
  den = g == 0 ? 1 : d / g;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num)
                  : std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
  const auto fail = [&]() {
    return InvalidArgument("cannot parse rational '" + text + "'");
  };
  if (text.empty()) throw fail();
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_n = 0, used_d = 0;
      const std::string ns = text.substr(0, slash), ds = text.substr(slash + 1);
      const long long n = std::stoll(ns, &used_n);
      const long long d = std::stoll(ds, &used_d);
      if (used_n != ns.size() || used_d != ds.size()) throw fail();
      return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(text, &used);
      if (used != text.size()) throw fail();
      return Rational(n, 1);
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15 ||
        frac.find_first_not_of("0123456789") != std::string::npos) {
      throw fail();
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const bool negative = !whole.empty() && whole[0] == '-';
    std::int64_t w = 0;
    if (!whole.empty() && whole != "-" && whole != "+") {
      std::size_t used = 0;
      w = std::llabs(std::stoll(whole, &used));
      if (used != whole.size()) throw fail();
    }
    const std::int64_t n = w * scale + std::stoll(frac);
    return Rational(negative ? -n : n, scale);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception&) {
    throw fail();
  }
}

Rational operator*(const Rational& a, const Rational& b) {
  const Rational x(a.num, b.den), y(b.num, a.den);
  return Rational(x.num * y.num, x.den * y.den);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw InvalidArgument("division by zero rational");
  return a * Rational(b.den, b.num);
}

void PrivacyBudget::validate() const {
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (delta_f.num <= 0) throw InvalidArgument("delta_f must be positive");
}

Partition::Partition(Rational beta, std::vector<std::int64_t> breakpoints)
    : beta_(beta), bp_(std::move(breakpoints)) {
  if (beta_.num <= 0) throw InvalidArgument("beta must be positive");
  if (bp_.size() < 2) throw InvalidArgument("partition needs >= 1 cell");
  for (std::size_t i = 1; i < bp_.size(); ++i) {
    if (bp_[i] <= bp_[i - 1]) {
      throw InvalidArgument("breakpoints must be strictly increasing");
    }
  }
}

std::pair<double, double> Partition::cell(std::size_t j) const {
  const double b = beta_.value();
  return {static_cast<double>(bp_[j]) * b, static_cast<double>(bp_[j + 1]) * b};
}

std::ptrdiff_t Partition::locate(std::int64_t x) const {
  if (x < bp_.front() || x >= bp_.back()) return -1;
  const auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
  return (it - bp_.begin()) - 1;
}

std::int64_t Partition::units_per(const Rational& delta_f) const {
  const Rational r = delta_f / beta_;
  if (r.den != 1 || r.num <= 0) {
    throw InvalidArgument("beta " + beta_.str() + " does not divide delta_f " +
                          delta_f.str());
  }
  return r.num;
}

Event::Event(std::vector<Segment> segments) {
  std::sort(segments.begin(), segments.end());
  for (const auto& [a, b] : segments) {
    if (b <= a) continue;
    if (!seg_.empty() && a <= seg_.back().second) {
      seg_.back().second = std::max(seg_.back().second, b);
    } else {
      seg_.emplace_back(a, b);
    }
  }
}

std::int64_t Event::measure_units() const {
  std::int64_t m = 0;
  for (const auto& [a, b] : seg_) m += b - a;
  return m;
}

void Event::append(std::int64_t a, std::int64_t b) {
  if (b <= a) return;
  if (!seg_.empty()) {
    if (a < seg_.back().second) throw InvalidArgument("unordered append");
    if (a == seg_.back().second) {
      seg_.back().second = b;
      return;
    }
  }
  seg_.emplace_back(a, b);
}

Event Event::shifted(std::int64_t units) const {
  Event e;
  e.seg_ = seg_;
  for (auto& [a, b] : e.seg_) {
    a += units;
    b += units;
  }
  return e;
}

Event Event::scaled(std::int64_t factor) const {
  Event e;
  e.seg_ = seg_;
  for (auto& [a, b] : e.seg_) {
    a *= factor;
    b *= factor;
  }
  return e;
}

std::size_t Event::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  const std::hash<std::int64_t> hs;
  for (const auto& [a, b] : seg_) {
    h ^= hs(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= hs(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Partition uniform_partition(std::int64_t L, std::int64_t k,
                            const Rational& delta_f) {
  if (L < 0) throw InvalidArgument("L must be non-negative");
  if (k < 1) throw InvalidArgument("k must be positive");
  if (delta_f.num <= 0) throw InvalidArgument("delta_f must be positive");
  std::vector<std::int64_t> bp(static_cast<std::size_t>(2 * L + 2));
  std::iota(bp.begin(), bp.end(), -L);
  return Partition(delta_f / Rational(k), std::move(bp));
}

Partition refine(const Partition& p, std::int64_t k) {
  if (k < 1) throw InvalidArgument("refinement factor must be positive");
  if (k == 1) return p;
  const auto& bp = p.breakpoints();
  std::vector<std::int64_t> out;
  out.reserve((bp.size() - 1) * static_cast<std::size_t>(k) + 1);
  for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
    const std::int64_t w = bp[j + 1] - bp[j];
    for (std::int64_t s = 0; s < k; ++s) out.push_back(bp[j] * k + s * w);
  }
  out.push_back(bp.back() * k);
  return Partition(p.beta() / Rational(k), std::move(out));
}

Partition pad(const Partition& p, std::int64_t t) {
  if (t < 1) throw InvalidArgument("padding must be positive");
  const auto& bp = p.breakpoints();
  std::vector<std::int64_t> out;
  out.reserve(bp.size() + 2 * static_cast<std::size_t>(t));
  for (std::int64_t s = t; s >= 1; --s) out.push_back(bp.front() - s);
  out.insert(out.end(), bp.begin(), bp.end());
  for (std::int64_t s = 1; s <= t; ++s) out.push_back(bp.back() + s);
  return Partition(p.beta(), std::move(out));
}

std::int64_t overlap_units(const Partition& p, std::size_t j, const Event& a,
                           std::int64_t shift) {
  if (j >= p.n_cells()) throw InvalidArgument("cell index out of range");
  const std::int64_t lo = p.breakpoints()[j] + shift;
  const std::int64_t hi = p.breakpoints()[j + 1] + shift;
  std::int64_t m = 0;
  for (const auto& [s, e] : a.segments()) {
    if (e <= lo) continue;
    if (s >= hi) break;
    m += std::min(e, hi) - std::max(s, lo);
  }
  return m;
}

double overlap(const Partition& p, std::size_t j, const Event& a,
               std::int64_t shift) {
  return static_cast<double>(overlap_units(p, j, a, shift)) * p.beta().value();
}

Partition geometric_partition(std::int64_t fine, std::int64_t outer,
                              Rational beta) {
  if (fine < 1 || outer < fine) {
    throw InvalidArgument("geometric partition needs 1 <= fine <= outer");
  }
  std::vector<std::int64_t> right;
  for (std::int64_t x = 0; x < fine; ++x) right.push_back(x);
  std::int64_t x = fine, w = 2;
  while (x < outer) {
    right.push_back(x);
    x = std::min(outer, x + w);
    w *= 2;
  }
  right.push_back(outer);
  std::vector<std::int64_t> bp;
  for (auto it = right.rbegin(); it != right.rend(); ++it) {
    if (*it != 0) bp.push_back(-*it);
  }
  bp.insert(bp.end(), right.begin(), right.end());
  return Partition(beta, std::move(bp));
}

}  // namespace dpdro
