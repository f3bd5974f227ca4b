#include <gtest/gtest.h>

#include <random>

#include "mubench/functionals.hpp"
#include "support.hpp"

using namespace mubench;

namespace {

const char* const kCatalog[] = {"f0+f1",     "f3",         "const:7",  "f0+f1+1", "proj:2",     "search:4",
                                "cond:0:1:3", "cond:2:5:0", "f1+f1+f4", "const:0", "search:0",   "f0"};

/// Binary 0/1-fill sequence with the given prefix bits.
PresentedSequence binary(Nat prefix_bits, Nat length, Nat fill) {
  std::vector<Nat> bits(length);
  for (Nat i = 0; i < length; ++i) bits[i] = (prefix_bits >> i) & 1;
  return {bits, {fill}};
}

/// Smallest N such that g is constant on every cylinder of length N, checked
/// over the given horizon with both fills.
Nat brute_minimal_modulus(const TracedFunctional& g, Nat horizon) {
  for (Nat n = 0;; ++n) {
    bool ok = true;
    for (Nat head = 0; ok && head < (Nat{1} << n); ++head) {
      const Nat reference = g(binary(head, n, 0));
      for (Nat tail = 0; ok && tail < (Nat{1} << (horizon - n)); ++tail) {
        for (Nat fill : {Nat{0}, Nat{1}}) {
          ok = ok && g(binary(head | (tail << n), horizon, fill)) == reference;
        }
      }
    }
    if (ok) return n;
  }
}

}  // namespace

TEST(EvalTraced, Examples) {
  const auto sum01 = parse_functional("f0+f1");
  const auto run = eval_traced(sum01, view_of(PresentedSequence::constant(0)));
  EXPECT_EQ(run.value, 0u);
  EXPECT_EQ(run.queries, (std::set<Nat>{0, 1}));

  const auto seven = eval_traced(parse_functional("const:7"), view_of(PresentedSequence::constant(4)));
  EXPECT_EQ(seven.value, 7u);
  EXPECT_TRUE(seven.queries.empty());

  const auto third = eval_traced(parse_functional("f3"), view_of(PresentedSequence({}, {2})));
  EXPECT_EQ(third.value, 2u);
  EXPECT_EQ(third.queries, (std::set<Nat>{3}));
}

TEST(EvalTraced, AdaptiveQueriesDependOnAnswers) {
  const auto g = parse_functional("cond:0:1:3");
  EXPECT_EQ(eval_traced(g, view_of(PresentedSequence({1, 5}, {0}))).queries, (std::set<Nat>{0, 1}));
  EXPECT_EQ(eval_traced(g, view_of(PresentedSequence({0, 5, 0, 9}, {0}))).queries, (std::set<Nat>{0, 3}));
}

TEST(OmegaFan, Examples) {
  EXPECT_EQ(omega_fan(parse_functional("f0+f1")), 2u);
  EXPECT_EQ(omega_fan(parse_functional("const:7")), 0u);
  EXPECT_EQ(omega_fan(parse_functional("f3")), 4u);
  EXPECT_EQ(omega_fan(parse_functional("search:4")), 4u);
  EXPECT_EQ(omega_fan(parse_functional("cond:2:5:0")), 6u);
}

TEST(OmegaFan, BudgetStopsUnboundedExploration) {
  const TracedFunctional unbounded("first-one", [](const SequenceView& f) {
    Nat i = 0;
    while (f(i) == 0) ++i;
    return i;
  });
  EXPECT_THROW(omega_fan(unbounded, 1000), BudgetExceeded);
}

TEST(ThetaSpecial, Examples) {
  const auto a = theta_special(parse_functional("f0+f1+1"));
  EXPECT_EQ(a.bound, 3u);
  ASSERT_EQ(a.cover.size(), 8u);
  for (Nat i = 0; i < 8; ++i) {
    EXPECT_EQ(a.cover[i].at(0) * 4 + a.cover[i].at(1) * 2 + a.cover[i].at(2), i);
    EXPECT_EQ(a.cover[i].at(3), 0u);
  }

  const auto b = theta_special(parse_functional("const:0"));
  EXPECT_EQ(b.bound, 0u);
  ASSERT_EQ(b.cover.size(), 1u);
  EXPECT_EQ(b.cover[0], PresentedSequence::constant(0));

  const auto c = theta_special(parse_functional("f0"));
  EXPECT_EQ(c.bound, 1u);
  EXPECT_EQ(c.cover, (std::vector<PresentedSequence>{PresentedSequence::constant(0), PresentedSequence({1}, {0})}));
}

TEST(Catalog, RejectsMalformedNames) {
  EXPECT_THROW(parse_functional("proj"), ParseError);
  EXPECT_THROW(parse_functional("proj:x"), ParseError);
  EXPECT_THROW(parse_functional("g0+f1"), ParseError);
  EXPECT_THROW(parse_functional("cond:1:2"), ParseError);
  EXPECT_THROW(parse_functional("wobble:3"), ParseError);
}

TEST(XiByTracing, Examples) {
  const auto identity = [](const SequenceView& f, Nat k) {
    for (Nat i = 0; i < k; ++i) (void)f(i);
  };
  const SequenceView f = view_of(PresentedSequence({3, 1}, {0}));
  const SequenceView g = view_of(PresentedSequence::constant(2));
  EXPECT_EQ(xi_by_tracing(identity, f, g, 5), 5u);
  const auto constant = [](const SequenceView&, Nat) {};
  EXPECT_EQ(xi_by_tracing(constant, f, g, 9), 0u);
}

TEST(E2, Examples) {
  const auto phi = e2_from_mu(mu_exact);
  EXPECT_EQ(phi(PresentedSequence::constant(1)), 1u);
  EXPECT_EQ(phi(PresentedSequence::single(3, 0, 1)), 0u);
  EXPECT_EQ(phi(PresentedSequence({0}, {1})), 0u);
  EXPECT_THROW(phi(OpaqueSequence([](Nat) { return Nat{1}; })), UnsupportedPresentation);

  const auto mu = mu_from_e2(phi);
  EXPECT_EQ(mu(PresentedSequence::single(2, 0, 1)), 2u);
  EXPECT_EQ(mu(PresentedSequence::constant(1)), std::nullopt);
  EXPECT_EQ(mu(PresentedSequence::constant(0)), 0u);
}

TEST(FunctionalProperties, OmegaIsSoundAndNotBelowMinimalModulus) {
  for (const char* name : kCatalog) {
    const auto g = parse_functional(name);
    const Nat n = omega_fan(g);
    const Nat horizon = std::max<Nat>(n, 1) + 2;
    for (Nat head = 0; head < (Nat{1} << n); ++head) {
      const Nat reference = g(binary(head, n, 0));
      for (Nat tail = 0; tail < (Nat{1} << (horizon - n)); ++tail) {
        for (Nat fill : {Nat{0}, Nat{1}}) {
          ASSERT_EQ(g(binary(head | (tail << n), horizon, fill)), reference) << name;
        }
      }
    }
    ASSERT_GE(n, brute_minimal_modulus(g, horizon)) << name;
  }
}

TEST(FunctionalProperties, OmegaMatchesLargestQueryOverAllBinaryPrefixes) {
  for (const char* name : kCatalog) {
    const auto g = parse_functional(name);
    const Nat n = omega_fan(g);
    Nat largest = 0;
    const Nat horizon = n + 3;
    for (Nat head = 0; head < (Nat{1} << horizon); ++head) {
      for (Nat q : eval_traced(g, view_of(binary(head, horizon, 0))).queries) largest = std::max(largest, q + 1);
    }
    ASSERT_EQ(n, largest) << name;
  }
}

TEST(FunctionalProperties, ThetaBoundDominatesZeroTailValues) {
  for (const char* name : kCatalog) {
    const auto g = parse_functional(name);
    const auto theta = theta_special(g);
    ASSERT_EQ(theta.cover.size(), Nat{1} << theta.bound) << name;
    for (Nat head = 0; head < 64; ++head) ASSERT_LE(g(binary(head, 6, 0)), theta.bound) << name;
  }
}

TEST(FunctionalProperties, XiContractForSequenceFunctionals) {
  const auto prefix_sums = [](const SequenceView& f, Nat k) {
    std::vector<Nat> out;
    Nat acc = 0;
    for (Nat i = 0; i < k; ++i) out.push_back(acc += f(i));
    return out;
  };
  const auto evens = [](const SequenceView& f, Nat k) {
    std::vector<Nat> out;
    for (Nat i = 0; i < k; ++i) out.push_back(f(2 * i));
    return out;
  };
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = testing_support::random_sequence(rng, 8, 3, 2);
    const auto b = testing_support::random_sequence(rng, 8, 3, 2);
    const Nat k = rng() % 6;
    const auto check = [&](const auto& phi) {
      const Nat n = xi_by_tracing(phi, view_of(a), view_of(b), k);
      bool agree = true;
      for (Nat i = 0; i < n; ++i) agree = agree && a.at(i) == b.at(i);
      if (agree) {
        ASSERT_EQ(phi(view_of(a), k), phi(view_of(b), k));
      }
    };
    check(prefix_sums);
    check(evens);
  }
}

TEST(FunctionalProperties, MuRoundTripThroughE2) {
  const auto mu = mu_from_e2(e2_from_mu(mu_exact));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = testing_support::random_sequence(rng, 6, 4, 2);
    ASSERT_EQ(mu(f), mu_exact(f)) << f.to_string();
  }
}
