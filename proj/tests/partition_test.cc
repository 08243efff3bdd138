#include <gtest/gtest.h>

#include <random>

#include "dpdro/partition.h"

namespace dpdro {
namespace {

std::vector<std::int64_t> range(std::int64_t a, std::int64_t b) {
  std::vector<std::int64_t> v;
  for (std::int64_t i = a; i <= b; ++i) v.push_back(i);
  return v;
}

TEST(Rational, ReducesAndParses) {
  EXPECT_EQ(Rational(70, 194), Rational(35, 97));
  EXPECT_EQ(Rational(3, -6), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("0.125"), Rational(1, 8));
  EXPECT_EQ(Rational::parse("-2/7"), Rational(-2, 7));
  EXPECT_EQ(Rational::parse("3"), Rational(3));
  EXPECT_EQ(Rational(35, 97).str(), "35/97");
  EXPECT_THROW(Rational(1, 0), InvalidArgument);
  EXPECT_THROW(Rational::parse("x"), InvalidArgument);
  EXPECT_THROW(Rational::parse("1/0"), InvalidArgument);
}

TEST(PrivacyBudget, Validates) {
  EXPECT_NO_THROW((PrivacyBudget{1, 0.2, Rational(1)}.validate()));
  EXPECT_THROW((PrivacyBudget{0, 0.2, Rational(1)}.validate()), InvalidArgument);
  EXPECT_THROW((PrivacyBudget{1, 0, Rational(1)}.validate()), InvalidArgument);
  EXPECT_THROW((PrivacyBudget{1, 1.5, Rational(1)}.validate()), InvalidArgument);
  EXPECT_THROW((PrivacyBudget{1, 0.2, Rational(-1)}.validate()), InvalidArgument);
}

TEST(UniformPartition, Examples) {
  const Partition a = uniform_partition(1, 1, Rational(1));
  EXPECT_EQ(a.breakpoints(), range(-1, 2));
  EXPECT_EQ(a.beta(), Rational(1));
  EXPECT_EQ(a.n_cells(), 3u);
  EXPECT_DOUBLE_EQ(a.cell(0).first, -1);
  EXPECT_DOUBLE_EQ(a.cell(2).second, 2);

  const Partition b = uniform_partition(2, 2, Rational(1));
  EXPECT_EQ(b.beta(), Rational(1, 2));
  EXPECT_EQ(b.n_cells(), 5u);
  EXPECT_DOUBLE_EQ(b.cell(0).first, -1);
  EXPECT_DOUBLE_EQ(b.cell(4).second, 1.5);

  const Partition c = uniform_partition(0, 1, Rational(1));
  EXPECT_EQ(c.n_cells(), 1u);
  EXPECT_DOUBLE_EQ(c.cell(0).first, 0);
  EXPECT_DOUBLE_EQ(c.cell(0).second, 1);

  EXPECT_THROW(uniform_partition(-1, 1, Rational(1)), InvalidArgument);
  EXPECT_THROW(uniform_partition(1, 0, Rational(1)), InvalidArgument);
}

TEST(Partition, RejectsBadBreakpoints) {
  EXPECT_THROW(Partition(Rational(1), {0, 0}), InvalidArgument);
  EXPECT_THROW(Partition(Rational(1), {0}), InvalidArgument);
  EXPECT_THROW(Partition(Rational(-1), {0, 1}), InvalidArgument);
  EXPECT_THROW(Partition(Rational(1), {2, 1}), InvalidArgument);
}

TEST(Partition, UnitsPerRequiresDivisibility) {
  const Partition p = uniform_partition(1, 4, Rational(2));
  EXPECT_EQ(p.beta(), Rational(1, 2));
  EXPECT_EQ(p.units_per(Rational(2)), 4);
  EXPECT_THROW(p.units_per(Rational(1, 3)), InvalidArgument);
}

TEST(Partition, Locate) {
  const Partition p(Rational(1), {-3, -1, 0, 4});
  EXPECT_EQ(p.locate(-4), -1);
  EXPECT_EQ(p.locate(-3), 0);
  EXPECT_EQ(p.locate(-2), 0);
  EXPECT_EQ(p.locate(-1), 1);
  EXPECT_EQ(p.locate(3), 2);
  EXPECT_EQ(p.locate(4), -1);
}

TEST(Refine, Examples) {
  const Partition p = uniform_partition(1, 1, Rational(1));
  const Partition r = refine(p, 2);
  EXPECT_EQ(r.breakpoints(), range(-2, 4));
  EXPECT_EQ(r.beta(), Rational(1, 2));
  EXPECT_EQ(refine(p, 1), p);
  const Partition g(Rational(1, 3), {-5, -2, 0, 1, 7});
  EXPECT_EQ(refine(refine(g, 2), 2), refine(g, 4));
  EXPECT_EQ(refine(g, 3).n_cells(), 3 * g.n_cells());
  // Same real set.
  EXPECT_DOUBLE_EQ(refine(g, 3).cell(0).first, g.cell(0).first);
  EXPECT_DOUBLE_EQ(refine(g, 3).cell(3 * g.n_cells() - 1).second, g.cell(g.n_cells() - 1).second);
  EXPECT_THROW(refine(g, 0), InvalidArgument);
}

TEST(Pad, Examples) {
  const Partition p = uniform_partition(1, 1, Rational(1));
  EXPECT_EQ(pad(p, 1).breakpoints(), range(-2, 3));
  const Partition g(Rational(1, 2), {-4, -1, 0, 3});
  EXPECT_EQ(pad(g, 3).n_cells(), g.n_cells() + 6);
  EXPECT_THROW(pad(g, 0), InvalidArgument);
  // Dropping the padded cells gives back the original breakpoints.
  const auto& bp = pad(g, 2).breakpoints();
  EXPECT_EQ(std::vector<std::int64_t>(bp.begin() + 2, bp.end() - 2), g.breakpoints());
}

TEST(Pad, CommutesWithRefine) {
  const Partition g(Rational(1, 2), {-4, -1, 0, 3});
  for (std::int64_t k : {1, 2, 3}) {
    for (std::int64_t t : {1, 2}) {
      EXPECT_EQ(pad(refine(g, k), t * k).breakpoints(), refine(pad(g, t), k).breakpoints());
    }
  }
}

TEST(Event, Normalizes) {
  const Event e({{3, 5}, {0, 1}, {1, 2}, {4, 4}, {6, 6}});
  EXPECT_EQ(e.segments(), (std::vector<Event::Segment>{{0, 2}, {3, 5}}));
  EXPECT_EQ(e.measure_units(), 4);
  EXPECT_EQ(Event({{0, 3}, {1, 2}}).segments(), (std::vector<Event::Segment>{{0, 3}}));
  EXPECT_EQ(e.shifted(-2).segments(), (std::vector<Event::Segment>{{-2, 0}, {1, 3}}));
  EXPECT_EQ(e.scaled(3).segments(), (std::vector<Event::Segment>{{0, 6}, {9, 15}}));
  EXPECT_TRUE(Event().empty());
  EXPECT_EQ(Event({{0, 1}, {1, 2}}).hash(), Event({{0, 2}}).hash());
}

TEST(Event, AppendMerges) {
  Event e;
  e.append(0, 2);
  e.append(2, 3);
  e.append(5, 6);
  e.append(7, 7);
  EXPECT_EQ(e.segments(), (std::vector<Event::Segment>{{0, 3}, {5, 6}}));
  EXPECT_THROW(e.append(4, 8), InvalidArgument);
}

TEST(Overlap, Examples) {
  const Partition p = uniform_partition(1, 1, Rational(1));
  // Cell [-1, 0) shifted right by 1 is [0, 1); a = [0, 2).
  EXPECT_DOUBLE_EQ(overlap(p, 0, Event({{0, 2}}), 1), 1);
  EXPECT_DOUBLE_EQ(overlap(p, 0, Event({{1, 2}}), 0), 0);
  const Partition h = uniform_partition(2, 4, Rational(1));
  EXPECT_DOUBLE_EQ(overlap(h, 3, Event({{h.breakpoints()[3], h.breakpoints()[4]}}), 0), 0.25);
  EXPECT_THROW(overlap(p, 3, Event({{0, 1}}), 0), InvalidArgument);
}

TEST(Overlap, MatchesUnitCountAndPartitionOfUnity) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> w(1, 4), s(-6, 6), bit(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::int64_t> bp{-6};
    while (bp.back() < 6) bp.push_back(bp.back() + w(gen));
    const Partition p(Rational(1, 3), bp);
    Event a;
    for (std::int64_t u = -12; u < 12; ++u) {
      if (bit(gen)) a.append(u, u + 1);
    }
    const int shift = s(gen);
    std::int64_t total = 0;
    for (std::size_t j = 0; j < p.n_cells(); ++j) {
      std::int64_t count = 0;
      for (std::int64_t u = bp[j] + shift; u < bp[j + 1] + shift; ++u) {
        for (const auto& [x, y] : a.segments()) count += (x <= u && u < y);
      }
      EXPECT_EQ(overlap_units(p, j, a, shift), count);
      EXPECT_DOUBLE_EQ(overlap(p, j, a, shift), count / 3.0);
      total += overlap_units(p, j, Event({{p.lo(), p.hi()}}), 0);
    }
    EXPECT_EQ(total, p.hi() - p.lo());
  }
}

TEST(GeometricPartition, DoublesOutward) {
  const Partition g = geometric_partition(4, 40, Rational(1, 2));
  EXPECT_EQ(g.lo(), -40);
  EXPECT_EQ(g.hi(), 40);
  for (std::size_t j = 0; j < g.n_cells(); ++j) {
    if (g.breakpoints()[j] >= -4 && g.breakpoints()[j + 1] <= 4) EXPECT_EQ(g.width(j), 1);
    if (j + 1 < g.n_cells() && g.breakpoints()[j + 1] >= 4) {
      EXPECT_LE(g.width(j + 1), 2 * g.width(j));
    }
  }
  EXPECT_LT(g.n_cells(), 30u);
}

}  // namespace
}  // namespace dpdro
