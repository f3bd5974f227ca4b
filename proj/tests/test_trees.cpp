#include <gtest/gtest.h>

#include <random>

#include "mubench/trees.hpp"
#include "support.hpp"

using namespace mubench;

namespace {

std::vector<PresentedTree> tree_corpus() {
  std::vector<PresentedTree> out{
      PresentedTree::full(),
      PresentedTree::parse("flagtree:0:prefix=[1,1,1,0];tail=[1]"),
      PresentedTree::parse("flagtree:1:prefix=[1,1,1,0];tail=[1]"),
      PresentedTree::parse("flagtree:0:prefix=[];tail=[1]"),
      PresentedTree::parse("flagtree:1:prefix=[0];tail=[2]"),
      PresentedTree::parse("flagtree:0:prefix=[3,1];tail=[1,0]"),
      PresentedTree::parse("path:1011"),
      PresentedTree::parse("path:"),
      PresentedTree::parse("path:110+full@2"),
      PresentedTree::parse("path:01+full@5"),
      PresentedTree::parse("truncate:0:full"),
      PresentedTree::parse("truncate:3:flagtree:1:prefix=[1,1,1,1,1,0];tail=[1]"),
      PresentedTree::parse("truncate:6:path:1+full@1"),
      PresentedTree::parse("truncate:2:truncate:4:full"),
  };
  return out;
}

Nat brute_level_count(const PresentedTree& t, Nat n) {
  Nat count = 0;
  for (Nat b = 0; b < (Nat{1} << n); ++b) count += t.contains_unobserved({b, n}) ? 1 : 0;
  return count;
}

/// Whether some member of length `level` extends s, by enumeration.
bool brute_has_extension(const PresentedTree& t, const BitString& s, Nat level) {
  const Nat free = level - s.length;
  for (Nat b = 0; b < (Nat{1} << free); ++b) {
    if (t.contains_unobserved({(s.bits << free) | b, level})) return true;
  }
  return false;
}

}  // namespace

TEST(BitString, CodesAreLengthLexicographic) {
  EXPECT_EQ(BitString{}.code(), 0u);
  EXPECT_EQ(BitString::parse("0").code(), 1u);
  EXPECT_EQ(BitString::parse("1").code(), 2u);
  EXPECT_EQ(BitString::parse("00").code(), 3u);
  EXPECT_EQ(BitString::parse("11").code(), 6u);
  for (Nat c = 0; c < 5000; ++c) ASSERT_EQ(BitString::from_code(c).code(), c);
  EXPECT_THROW(BitString::parse("012"), ParseError);
}

TEST(LevelCount, Examples) {
  EXPECT_EQ(PresentedTree::full().level_count(5), 32u);
  const auto t0 = PresentedTree::parse("flagtree:0:prefix=[1,1,1,0];tail=[1]");
  EXPECT_EQ(t0.level_count(5), brute_level_count(t0, 5));
  EXPECT_EQ(t0.level_count(5), 16u);
  EXPECT_EQ(t0.level_count(2), 4u);
  for (const auto& t : tree_corpus()) EXPECT_EQ(t.level_count(0), 1u) << t.to_string();
}

TEST(MeasurePositive, Examples) {
  EXPECT_EQ(PresentedTree::full().measure_witness(), 1u);
  EXPECT_EQ(PresentedTree::parse("flagtree:0:prefix=[1,1,1,0];tail=[1]").measure_witness(), 2u);
  EXPECT_FALSE(PresentedTree::parse("path:1011").measure_positive());
  EXPECT_EQ(PresentedTree::parse("path:110+full@2").measure_witness(), 4u);
  EXPECT_FALSE(PresentedTree::parse("truncate:5:full").measure_positive());
  const auto opaque = PresentedTree::opaque([](const BitString&) { return true; }, "all");
  EXPECT_THROW(opaque.measure_positive(), UnsupportedFamily);
  EXPECT_EQ(opaque.level_count(4), 16u);
}

TEST(TreeSyntax, RoundTripsAndRejectsGarbage) {
  for (const auto& t : tree_corpus()) EXPECT_EQ(PresentedTree::parse(t.to_string()).to_string(), t.to_string());
  EXPECT_THROW(PresentedTree::parse("bush"), ParseError);
  EXPECT_THROW(PresentedTree::parse("flagtree:2:prefix=[];tail=[1]"), ParseError);
  EXPECT_THROW(PresentedTree::parse("path:10+half@3"), ParseError);
  EXPECT_THROW(PresentedTree::parse("truncate:x:full"), ParseError);
}

TEST(ScfCheck, Examples) {
  const auto singleton = PresentedTree::parse("truncate:0:full");
  const auto a = scf_check(parse_functional("f0+f1+1"), singleton);
  EXPECT_TRUE(a.antecedent);
  EXPECT_TRUE(a.consequent);
  EXPECT_TRUE(a.implication);

  const auto b = scf_check(parse_functional("f0+f3"), PresentedTree::full());
  EXPECT_FALSE(b.antecedent);
  EXPECT_TRUE(b.implication);

  const auto c = scf_check(parse_functional("const:0"), PresentedTree::parse("path:1"));
  EXPECT_FALSE(c.antecedent);
  EXPECT_TRUE(c.implication);
}

TEST(ObservedTree, ReportsCodesOfMembershipQueries) {
  auto log = std::make_shared<QueryLog>(kDefaultBudget, true);
  const auto t = PresentedTree::full().observed(observer_for(log));
  (void)t.contains(BitString::parse("10"));
  (void)t.contains_code(9);
  EXPECT_EQ(log->indices(), (std::set<Nat>{5, 9}));
}

TEST(TreeProperties, PrefixClosedToLevel12) {
  for (const auto& t : tree_corpus()) {
    for (Nat n = 1; n <= 12; ++n) {
      for (Nat b = 0; b < (Nat{1} << n); ++b) {
        const BitString s{b, n};
        if (t.contains_unobserved(s)) {
          ASSERT_TRUE(t.contains_unobserved(s.prefix(n - 1))) << t.to_string();
        }
      }
    }
  }
}

TEST(TreeProperties, LevelCountsMatchEnumeration) {
  std::mt19937_64 rng(41);
  auto trees = tree_corpus();
  for (int i = 0; i < 30; ++i) {
    trees.push_back(PresentedTree::flag_tree(rng() % 2, testing_support::random_sequence(rng, 8, 3, 2)));
  }
  for (const auto& t : trees) {
    for (Nat n = 0; n <= 12; ++n) ASSERT_EQ(t.level_count(n), brute_level_count(t, n)) << t.to_string() << " @" << n;
  }
}

TEST(TreeProperties, MeasureWitnessBoundsEveryLevelRatio) {
  for (const auto& t : tree_corpus()) {
    const auto k = t.measure_witness();
    if (!k) {
      // Zero measure shows as a ratio falling below 1/2^12 or vanishing levels.
      ASSERT_LT(brute_level_count(t, 12) * 4, Nat{1} << 12) << t.to_string();
      continue;
    }
    for (Nat n = 0; n <= 12; ++n) ASSERT_GE(brute_level_count(t, n) * *k, Nat{1} << n) << t.to_string();
  }
}

TEST(TreeProperties, DeadLevelMatchesEnumeration) {
  for (const auto& t : tree_corpus()) {
    for (Nat len = 0; len <= 5; ++len) {
      for (Nat b = 0; b < (Nat{1} << len); ++b) {
        const BitString s{b, len};
        const auto dead = t.dead_level(s, mu_exact);
        for (Nat level = len; level <= 12; ++level) {
          const bool alive = !dead || level < *dead;
          ASSERT_EQ(alive, brute_has_extension(t, s, level)) << t.to_string() << " " << s.to_string() << " @" << level;
        }
      }
    }
  }
}

TEST(TreeProperties, ScfImplicationAlwaysHolds) {
  const char* functionals[] = {"f0+f1+1", "f0", "const:0", "const:2", "const:4", "f2+1", "search:3", "cond:0:1:2"};
  for (const char* name : functionals) {
    for (const auto& t : tree_corpus()) {
      const auto report = scf_check(parse_functional(name), t);
      ASSERT_TRUE(report.implication) << name << " on " << t.to_string();
      // Consequent by enumeration over every string at level `bound`.
      ASSERT_EQ(report.consequent, brute_level_count(t, report.bound) == 0);
    }
  }
}
