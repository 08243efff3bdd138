#include "dpdro/separation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace dpdro {
namespace {

constexpr std::int64_t kNoPoint = std::numeric_limits<std::int64_t>::max();

std::vector<double> densities(const Partition& part, const std::vector<double>& p) {
  std::vector<double> f(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    f[j] = p[j] / static_cast<double>(part.width(j));
  }
  return f;
}

// Everything the sweep needs about one comparison: source density fa against
// e^eps times target density fb shifted right by phi.
struct Pair {
  const Partition* part;
  const double* fa;
  const double* fb;
  std::int64_t lo;
  std::int64_t hi;
  double ee;
};

// Integral over the window of the positive part of fa(x) - ee * fb(x - phi);
// writes the support of the positive part to `out` when given.
double sweep(const Pair& q, std::int64_t phi, Event* out) {
  const auto& b = q.part->breakpoints();
  const auto n = static_cast<std::ptrdiff_t>(b.size()) - 1;
  std::int64_t x = q.lo;
  auto pa = std::upper_bound(b.begin(), b.end(), x) - b.begin();
  auto pb = std::upper_bound(b.begin(), b.end(), x - phi) - b.begin();
  double v = 0;
  while (x < q.hi) {
    const std::int64_t na = pa <= n ? b[pa] : kNoPoint;
    const std::int64_t nb = pb <= n ? b[pb] + phi : kNoPoint;
    const std::int64_t nx = std::min({q.hi, na, nb});
    const double da = (pa >= 1 && pa <= n) ? q.fa[pa - 1] : 0.0;
    const double db = (pb >= 1 && pb <= n) ? q.fb[pb - 1] : 0.0;
    const double g = da - q.ee * db;
    if (g > 0) {
      v += static_cast<double>(nx - x) * g;
      if (out != nullptr) out->append(x, nx);
    }
    x = nx;
    while (pa <= n && b[pa] <= x) ++pa;
    while (pb <= n && b[pb] + phi <= x) ++pb;
  }
  return v;
}

// Cell-pair construction: tail pieces of source cells not covered by any
// shifted target cell, plus every source-cell / shifted-target-cell
// intersection with a positive density difference.
double pairing(const Pair& q, std::int64_t phi, Event* out) {
  const auto& b = q.part->breakpoints();
  const std::size_t n = b.size() - 1;
  std::vector<Event::Segment> pieces;
  double v = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t s = std::max(b[j], q.lo), e = std::min(b[j + 1], q.hi);
    if (s >= e || !(q.fa[j] > 0)) continue;
    const std::int64_t cs = b.front() + phi, ce = b.back() + phi;
    const std::int64_t left_end = std::min(e, cs), right_start = std::max(s, ce);
    if (left_end > s) {
      v += static_cast<double>(left_end - s) * q.fa[j];
      pieces.emplace_back(s, left_end);
    }
    if (e > right_start) {
      v += static_cast<double>(e - right_start) * q.fa[j];
      pieces.emplace_back(right_start, e);
    }
    for (std::size_t jj = 0; jj < n; ++jj) {
      const double g = q.fa[j] - q.ee * q.fb[jj];
      if (!(g > 0)) continue;
      const std::int64_t is = std::max(s, b[jj] + phi);
      const std::int64_t ie = std::min(e, b[jj + 1] + phi);
      if (is >= ie) continue;
      v += static_cast<double>(ie - is) * g;
      pieces.emplace_back(is, ie);
    }
  }
  if (out != nullptr) *out = Event(std::move(pieces));
  return v;
}

// Shift candidates in decreasing order: breakpoint differences within the
// limit and the two extreme shifts.
std::vector<std::int64_t> shift_candidates(const Partition& part,
                                           std::int64_t limit) {
  const auto& b = part.breakpoints();
  std::vector<char> mark(static_cast<std::size_t>(2 * limit + 1), 0);
  mark[0] = mark[2 * limit] = 1;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i; j < b.size() && b[j] - b[i] <= limit; ++j) {
      const std::int64_t dd = b[j] - b[i];
      mark[limit + dd] = mark[limit - dd] = 1;
    }
  }
  std::vector<std::int64_t> out;
  for (std::int64_t s = limit; s >= -limit; --s) {
    if (mark[limit + s]) out.push_back(s);
  }
  return out;
}

template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct Task {
  Pair pair;
  std::int64_t phi;
  int source;
  int target;
};

// Evaluates all tasks and returns the `count` best in scan order with
// shortfall > threshold (count <= 0: only the single best, unconditionally).
std::vector<Violation> reduce(const std::vector<Task>& tasks, double delta,
                              int count, double threshold,
                              const OracleOptions& opt) {
  const auto eval = opt.naive ? pairing : sweep;
  std::vector<double> value(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
    value[i] = eval(tasks[i].pair, tasks[i].phi, nullptr) - delta;
  });
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
  std::vector<Violation> out;
  const std::size_t keep = count <= 0 ? 1 : static_cast<std::size_t>(count);
  for (std::size_t r = 0; r < order.size() && out.size() < keep; ++r) {
    const std::size_t i = order[r];
    if (count > 0 && !(value[i] > threshold)) break;
    Violation v;
    v.phi_units = tasks[i].phi;
    v.source = tasks[i].source;
    v.target = tasks[i].target;
    v.shortfall = eval(tasks[i].pair, tasks[i].phi, &v.event) - delta;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Task> independent_tasks(const NoiseDistribution& p,
                                    const std::vector<double>& f) {
  const auto [lo, hi] = p.event_window();
  const Pair pair{&p.partition, f.data(), f.data(), lo, hi,
                  std::exp(p.budget.epsilon)};
  std::vector<Task> tasks;
  for (std::int64_t phi : shift_candidates(p.partition, p.shift_limit())) {
    tasks.push_back({pair, phi, -1, -1});
  }
  return tasks;
}

std::vector<Task> dependent_tasks(const DependentNoise& fam,
                                  const std::vector<std::vector<double>>& f) {
  const auto [lo, hi] = fam.event_window();
  const std::int64_t limit = fam.shift_limit();
  const double ee = std::exp(fam.budget.epsilon);
  const int k_count = static_cast<int>(fam.n_outputs());
  std::vector<Task> tasks;
  for (int k = 0; k < k_count; ++k) {
    for (int m = 0; m < k_count; ++m) {
      const Pair pair{&fam.partition, f[k].data(), f[m].data(), lo, hi, ee};
      for (int off = 1; off >= -1; --off) {
        const std::int64_t phi = m - k + off;
        if (std::abs(phi) <= limit) tasks.push_back({pair, phi, k, m});
      }
    }
  }
  return tasks;
}

std::vector<std::vector<double>> family_densities(const DependentNoise& fam) {
  std::vector<std::vector<double>> f;
  for (const auto& w : fam.weights) {
    if (w.size() != fam.partition.n_cells()) {
      throw InvalidArgument("family member does not match the partition");
    }
    f.push_back(densities(fam.partition, w));
  }
  return f;
}

double shortfall_core(const Partition& part, const std::vector<double>& pa,
                      const std::vector<double>& pb, double epsilon,
                      double delta, std::int64_t phi, const Event& a) {
  double lhs = 0, rhs = 0;
  for (std::size_t j = 0; j < part.n_cells(); ++j) {
    const double w = static_cast<double>(part.width(j));
    lhs += pa[j] * static_cast<double>(overlap_units(part, j, a, 0)) / w;
    rhs += pb[j] * static_cast<double>(overlap_units(part, j, a, phi)) / w;
  }
  return lhs - std::exp(epsilon) * rhs - delta;
}

// Best subset of unit cells for fixed per-unit contributions: all positive
// ones. Enumerated exhaustively to serve as an independent check.
struct Subset {
  double value;
  std::uint32_t mask;
};

Subset best_subset(const std::vector<double>& unit) {
  const std::size_t u = unit.size();
  Subset best{0.0, 0};
  std::vector<double> sum(std::size_t{1} << u, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << u); ++mask) {
    const int low = __builtin_ctz(mask);
    sum[mask] = sum[mask & (mask - 1)] + unit[low];
    if (sum[mask] > best.value) best = {sum[mask], mask};
  }
  return best;
}

Event mask_event(std::int64_t lo, std::uint32_t mask, std::size_t u) {
  std::vector<Event::Segment> seg;
  for (std::size_t i = 0; i < u; ++i) {
    if (mask & (1u << i)) {
      seg.emplace_back(lo + static_cast<std::int64_t>(i),
                       lo + static_cast<std::int64_t>(i) + 1);
    }
  }
  return Event(std::move(seg));
}

}  // namespace

double shortfall_of(const NoiseDistribution& p, std::int64_t phi, const Event& a) {
  if (std::abs(phi) > p.shift_limit()) throw InvalidArgument("shift exceeds delta_f");
  return shortfall_core(p.partition, p.weights, p.weights, p.budget.epsilon,
                        p.budget.delta, phi, a);
}

double shortfall_of(const DependentNoise& f, int source, int target,
                    std::int64_t phi, const Event& a) {
  const int k = static_cast<int>(f.n_outputs());
  if (source < 0 || source >= k || target < 0 || target >= k) {
    throw InvalidArgument("output cell index out of range");
  }
  if (std::abs(phi) > f.shift_limit()) throw InvalidArgument("shift exceeds delta_f");
  return shortfall_core(f.partition, f.weights[source], f.weights[target],
                        f.budget.epsilon, f.budget.delta, phi, a);
}

Violation max_shortfall(const NoiseDistribution& p, const OracleOptions& opt) {
  const auto f = densities(p.partition, p.weights);
  return reduce(independent_tasks(p, f), p.budget.delta, 0, 0, opt).front();
}

std::vector<Violation> top_shortfalls(const NoiseDistribution& p, int count,
                                      double threshold, const OracleOptions& opt) {
  const auto f = densities(p.partition, p.weights);
  return reduce(independent_tasks(p, f), p.budget.delta, std::max(count, 1),
                threshold, opt);
}

Violation max_shortfall_dependent(const DependentNoise& fam,
                                  const OracleOptions& opt) {
  const auto f = family_densities(fam);
  const auto tasks = dependent_tasks(fam, f);
  if (tasks.empty()) throw InvalidArgument("no admissible output pairs");
  return reduce(tasks, fam.budget.delta, 0, 0, opt).front();
}

std::vector<Violation> top_shortfalls_dependent(const DependentNoise& fam,
                                                int count, double threshold,
                                                const OracleOptions& opt) {
  const auto f = family_densities(fam);
  return reduce(dependent_tasks(fam, f), fam.budget.delta, std::max(count, 1),
                threshold, opt);
}

Violation brute_force(const NoiseDistribution& p) {
  const auto [lo, hi] = p.event_window();
  const auto u = static_cast<std::size_t>(hi - lo);
  if (u > 20) throw InvalidArgument("brute force limited to 20 unit cells");
  const std::int64_t limit = p.shift_limit();
  Violation best;
  bool first = true;
  for (std::int64_t phi = limit; phi >= -limit; --phi) {
    std::vector<double> unit(u);
    for (std::size_t i = 0; i < u; ++i) {
      const std::int64_t x = lo + static_cast<std::int64_t>(i);
      unit[i] = shortfall_of(p, phi, Event({{x, x + 1}})) + p.budget.delta;
    }
    const Subset s = best_subset(unit);
    const double v = s.value - p.budget.delta;
    if (first || v > best.shortfall) {
      best.phi_units = phi;
      best.event = mask_event(lo, s.mask, u);
      best.shortfall = v;
      first = false;
    }
  }
  return best;
}

Violation brute_force(const DependentNoise& fam) {
  const auto [lo, hi] = fam.event_window();
  const auto u = static_cast<std::size_t>(hi - lo);
  if (u > 20) throw InvalidArgument("brute force limited to 20 unit cells");
  const std::int64_t limit = fam.shift_limit();
  const int kc = static_cast<int>(fam.n_outputs());
  Violation best;
  bool first = true;
  for (int k = 0; k < kc; ++k) {
    for (int m = 0; m < kc; ++m) {
      for (int off = 1; off >= -1; --off) {
        const std::int64_t phi = m - k + off;
        if (std::abs(phi) > limit) continue;
        std::vector<double> unit(u);
        for (std::size_t i = 0; i < u; ++i) {
          const std::int64_t x = lo + static_cast<std::int64_t>(i);
          unit[i] = shortfall_of(fam, k, m, phi, Event({{x, x + 1}})) +
                    fam.budget.delta;
        }
        const Subset s = best_subset(unit);
        const double v = s.value - fam.budget.delta;
        if (first || v > best.shortfall) {
          best.phi_units = phi;
          best.event = mask_event(lo, s.mask, u);
          best.shortfall = v;
          best.source = k;
          best.target = m;
          first = false;
        }
      }
    }
  }
  if (first) throw InvalidArgument("no admissible output pairs");
  return best;
}

AuditResult audit(const NoiseDistribution& p, double tol, const OracleOptions& opt) {
  AuditResult r;
  r.worst = max_shortfall(p, opt);
  r.feasible = r.worst.shortfall <= tol;
  return r;
}

AuditResult audit(const DependentNoise& f, double tol, const OracleOptions& opt) {
  AuditResult r;
  r.worst = max_shortfall_dependent(f, opt);
  r.feasible = r.worst.shortfall <= tol;
  return r;
}

}  // namespace dpdro
