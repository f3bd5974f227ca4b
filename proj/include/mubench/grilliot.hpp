#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mubench/error.hpp"
#include "mubench/functionals.hpp"
#include "mubench/rational.hpp"
#include "mubench/reals.hpp"
#include "mubench/sequence.hpp"
#include "mubench/trees.hpp"

namespace mubench {

/// Digits produced on demand from the digits before them, memoised.
class LazyDigits {
 public:
  using Step = std::function<Nat(const std::vector<Nat>& previous)>;

  explicit LazyDigits(Step step) : state_(std::make_shared<State>(State{std::move(step), {}})) {}

  /// Digit at 0-based position i.
  Nat at(Nat i) const {
    while (state_->digits.size() <= i) state_->digits.push_back(state_->step(state_->digits));
    return state_->digits[i];
  }

  std::vector<Nat> first(Nat n) const {
    if (n > 0) (void)at(n - 1);
    return {state_->digits.begin(), state_->digits.begin() + static_cast<std::ptrdiff_t>(n)};
  }

 private:
  struct State {
    Step step;
    std::vector<Nat> digits;
  };
  std::shared_ptr<State> state_;
};

/// Outcome of one extractor run: the recovered least index (if any) and the
/// search bound derived from the extensionality functional.
struct Extraction {
  std::optional<Nat> witness;
  Nat bound = 0;
};

namespace detail {

/// Least zero of f at an index <= bound, by direct scan.
inline std::optional<Nat> zero_up_to(const PresentedSequence& f, Nat bound) {
  for (Nat i = 0; i <= bound; ++i) {
    if (f.at(i) == 0) return i;
  }
  return std::nullopt;
}

inline Nat bounded_search(const PresentedSequence& f, Nat bound, const std::string& who) {
  if (auto i = zero_up_to(f, bound)) return *i;
  throw BoundViolation(who + ": outputs differ but " + f.to_string() + " has no zero at or below " +
                       std::to_string(bound));
}

/// The constructed counterexamples leave their domain when the first zero
/// sits at index 0 or 1; those cases are read off directly.
inline std::optional<Extraction> early_zero(const PresentedSequence& f) {
  if (f.at(0) == 0) return Extraction{0, 1};
  if (f.at(1) == 0) return Extraction{1, 1};
  return std::nullopt;
}

inline MuOperator as_mu(std::function<Extraction(const PresentedSequence&)> extract) {
  return [extract = std::move(extract)](const PresentedSequence& f) { return extract(f).witness; };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Binary expansions

/// x = sum_{i>=1} digit(i) 2^-i.
class BinaryExpansion {
 public:
  explicit BinaryExpansion(LazyDigits digits) : digits_(std::move(digits)) {}

  /// Digit n, for n >= 1.
  Nat digit(Nat n) const {
    if (n == 0) throw OutOfRange("binary digits start at index 1");
    return digits_.at(n - 1);
  }

  Rational partial_sum(Nat n) const {
    Rational sum = 0;
    for (Nat i = 1; i <= n; ++i) {
      if (digit(i)) sum += pow2(-static_cast<std::int64_t>(i));
    }
    return sum;
  }

 private:
  LazyDigits digits_;
};

using UbinFunctional = std::function<BinaryExpansion(const FastCauchyReal&)>;

/// Digit n+1 is 1 iff x >= (partial sum of n digits) + 2^-(n+1); a dyadic x
/// therefore gets digit 1 followed by zeros.
inline UbinFunctional ubin_from_mu(MuOperator mu) {
  return [mu = std::move(mu)](const FastCauchyReal& x) {
    if (compare_by_reads(x, 0, mu) < 0 || compare_by_reads(x, 1, mu) > 0) {
      throw OutOfRange("real " + x.describe() + " outside [0,1]");
    }
    return BinaryExpansion(LazyDigits([x, mu](const std::vector<Nat>& previous) {
      Rational partial = 0;
      for (std::size_t i = 0; i < previous.size(); ++i) {
        if (previous[i]) partial += pow2(-static_cast<std::int64_t>(i + 1));
      }
      const Rational threshold = partial + pow2(-static_cast<std::int64_t>(previous.size() + 1));
      return compare_by_reads(x, threshold, mu) >= 0 ? Nat{1} : Nat{0};
    }));
  };
}

/// Xi for a binary-expansion functional, by tracing approximation reads.
inline ExtensionalityFunctional<FastCauchyReal> ubin_xi(UbinFunctional phi) {
  return xi_for<FastCauchyReal>([phi = std::move(phi)](const FastCauchyReal& x, Nat k) {
    const auto expansion = phi(x);
    for (Nat n = 1; n <= k; ++n) (void)expansion.digit(n);
  });
}

inline Extraction extract_via_ubin(const UbinFunctional& phi, const ExtensionalityFunctional<FastCauchyReal>& xi,
                                   const PresentedSequence& f) {
  if (auto early = detail::early_zero(f)) return *early;
  const auto [lo, hi] = counterexample_pair(f);
  const Nat bound = xi(lo, hi, 1) + 2;
  if (phi(lo).digit(1) == phi(hi).digit(1)) return {std::nullopt, bound};
  return {detail::bounded_search(f, bound, "binary expansion"), bound};
}

inline MuOperator mu_from_ubin(UbinFunctional phi, ExtensionalityFunctional<FastCauchyReal> xi) {
  return detail::as_mu([phi = std::move(phi), xi = std::move(xi)](const PresentedSequence& f) {
    return extract_via_ubin(phi, xi, f);
  });
}

// ---------------------------------------------------------------------------
// Weak weak Koenig's lemma

/// (T0, T1): T_i holds every string starting with i, and strings starting
/// with 1-i as long as f has no zero at an index <= their length.
inline std::pair<PresentedTree, PresentedTree> trees_from_flag(const PresentedSequence& f) {
  return {PresentedTree::flag_tree(0, f), PresentedTree::flag_tree(1, f)};
}

namespace detail {

/// Decides whether s has members at every level above it. The levels up to
/// the presentation's dead level are read by exhaustive descent through the
/// members; `mu` then decides the resulting alive/dead sequence.
inline bool extensible_by_reads(const PresentedTree& tree, const BitString& s, const MuOperator& mu) {
  const Nat horizon = tree.dead_level(s, mu).value_or(s.length);
  std::vector<Nat> alive(horizon - s.length + 1, 0);
  std::vector<BitString> stack;
  if (tree.contains(s)) stack.push_back(s);
  while (!stack.empty()) {
    const BitString node = stack.back();
    stack.pop_back();
    alive[node.length - s.length] = 1;
    if (node.length == horizon) continue;
    for (bool bit : {true, false}) {
      const BitString child = node.extended(bit);
      if (tree.contains(child)) stack.push_back(child);
    }
  }
  const Nat last = alive.back();
  alive.pop_back();
  return !mu(PresentedSequence(std::move(alive), {last}));
}

}  // namespace detail

/// A path through a tree: bits on demand plus the eventually-constant form.
class TreePath {
 public:
  TreePath(LazyDigits bits, Nat settled) : bits_(std::move(bits)), settled_(settled) {}

  Nat bit(Nat n) const { return bits_.at(n); }

  /// The path as a presented sequence; bits stop changing after `settled`.
  PresentedSequence presented() const {
    auto prefix = bits_.first(settled_ + 1);
    const Nat last = prefix.back();
    prefix.pop_back();
    return PresentedSequence(std::move(prefix), {last});
  }

 private:
  LazyDigits bits_;
  Nat settled_;
};

using UwwklFunctional = std::function<TreePath(const PresentedTree&)>;

/// Greedy path: extend by 1 when the 1-child has members at every level,
/// otherwise by 0.
inline UwwklFunctional uwwkl_from_mu(MuOperator mu) {
  return [mu = std::move(mu)](const PresentedTree& tree) {
    if (!tree.contains_unobserved(BitString{})) throw NotATree(tree.to_string() + " lacks the empty string");
    if (!tree.measure_positive(mu)) throw MeasureZero(tree.to_string() + " has measure zero");
    LazyDigits bits([tree, mu](const std::vector<Nat>& previous) {
      BitString node;
      for (Nat b : previous) node = node.extended(b != 0);
      if (detail::extensible_by_reads(tree, node.extended(true), mu)) return Nat{1};
      if (detail::extensible_by_reads(tree, node.extended(false), mu)) return Nat{0};
      throw NotATree(tree.to_string() + ": no infinite extension of " + node.to_string());
    });
    return TreePath(std::move(bits), tree.structure_depth());
  };
}

inline ExtensionalityFunctional<PresentedTree> uwwkl_xi(UwwklFunctional phi) {
  return xi_for<PresentedTree>([phi = std::move(phi)](const PresentedTree& tree, Nat k) {
    const auto path = phi(tree);
    for (Nat n = 0; n < k; ++n) (void)path.bit(n);
  });
}

/// Longest string length whose codes all lie below n: floor(log2 n).
inline Nat length_below_code(Nat n) { return n == 0 ? 0 : std::bit_width(n) - 1; }

inline Extraction extract_via_uwwkl(const UwwklFunctional& phi, const ExtensionalityFunctional<PresentedTree>& xi,
                                    const PresentedSequence& f) {
  const auto [t0, t1] = trees_from_flag(f);
  const Nat bound = length_below_code(xi(t0, t1, 1));
  if (phi(t0).bit(0) == phi(t1).bit(0)) return {std::nullopt, bound};
  return {detail::bounded_search(f, bound, "tree path"), bound};
}

inline MuOperator mu_from_uwwkl(UwwklFunctional phi, ExtensionalityFunctional<PresentedTree> xi) {
  return detail::as_mu([phi = std::move(phi), xi = std::move(xi)](const PresentedSequence& f) {
    return extract_via_uwwkl(phi, xi, f);
  });
}

// ---------------------------------------------------------------------------
// Continuous functions on [0,1]

/// Continuous piecewise-linear map through the given knots, sorted by x.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<Rational, Rational>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw ParseError("piecewise-linear map without knots");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (knots_[i].first <= knots_[i - 1].first) throw ParseError("knots must be strictly increasing");
    }
  }

  static PiecewiseLinear constant(Rational c) { return PiecewiseLinear({{0, c}, {1, std::move(c)}}); }

  Rational operator()(const Rational& x) const {
    if (x <= knots_.front().first) return knots_.front().second;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const auto& [x1, y1] = knots_[i];
      if (x <= x1) {
        const auto& [x0, y0] = knots_[i - 1];
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      }
    }
    return knots_.back().second;
  }

  const std::vector<std::pair<Rational, Rational>>& knots() const { return knots_; }

  /// Largest absolute slope.
  Rational lipschitz() const {
    Rational worst = 0;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const Rational slope = (knots_[i].second - knots_[i - 1].second) / (knots_[i].first - knots_[i - 1].first);
      worst = std::max(worst, abs(slope));
    }
    return worst;
  }

 private:
  std::vector<std::pair<Rational, Rational>> knots_;
};

/// Cantor pairing (j, k) -> (j + k)(j + k + 1)/2 + k.
inline Nat cantor_pair(Nat j, Nat k) { return (j + k) * (j + k + 1) / 2 + k; }

/// Position of a dyadic rational in the enumeration 0, 1, 1/2, 1/4, 3/4, 1/8, ...
inline Nat dyadic_index(const Rational& x) {
  if (x == 0) return 0;
  if (x == 1) return 1;
  const Integer den = boost::multiprecision::denominator(x);
  const Integer num = boost::multiprecision::numerator(x);
  if (x < 0 || x > 1 || (den & (den - 1)) != 0) throw OutOfRange(to_string(x) + " is not a dyadic point of [0,1]");
  const Nat level = boost::multiprecision::msb(den);
  if (level > 60) throw OutOfRange(to_string(x) + " is too fine for the dyadic enumeration");
  return (Nat{1} << (level - 1)) + static_cast<Nat>((num - 1) / 2) + 1;
}

/// f(x) = base(x) + weight(x) * eps, where eps is an optional flag series.
/// Reads of f(x)'s k-th approximation are reported as the code index
/// cantor_pair(dyadic_index(x), k) of the function's value table.
class RepresentedContinuousFunction {
 public:
  RepresentedContinuousFunction(PiecewiseLinear base, std::function<Nat(Nat)> modulus, std::string label)
      : base_(std::move(base)), modulus_(std::move(modulus)), label_(std::move(label)) {}

  RepresentedContinuousFunction with_offset(PiecewiseLinear weight, FlagSeries eps, std::string label) const {
    auto copy = *this;
    copy.weight_ = std::move(weight);
    copy.eps_ = std::move(eps);
    copy.label_ = std::move(label);
    return copy;
  }

  FastCauchyReal operator()(const Rational& x) const {
    FastCauchyReal value(base_(x));
    if (eps_) {
      const Rational w = (*weight_)(x);
      if (w != 0) value = FastCauchyReal::from_series(*eps_, w, base_(x));
    }
    if (!observer_) return value;
    const Nat point = dyadic_index(x);
    return value.observed([observer = observer_, point](Nat k) { observer(cantor_pair(point, k)); });
  }

  /// |x - y| < 1/modulus(k) implies |f(x) - f(y)| <= 1/k.
  Nat modulus(Nat k) const { return modulus_(k); }

  const std::string& label() const { return label_; }
  const PiecewiseLinear& base() const { return base_; }

  /// Points at which f attains its extremes: the knots of base and weight.
  std::vector<Rational> breakpoints() const {
    std::vector<Rational> xs;
    for (const auto& [x, y] : base_.knots()) xs.push_back(x);
    if (weight_) {
      for (const auto& [x, y] : weight_->knots()) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
  }

  RepresentedContinuousFunction observed(Observer observer) const {
    auto copy = *this;
    copy.observer_ = std::move(observer);
    return copy;
  }

 private:
  PiecewiseLinear base_;
  std::optional<PiecewiseLinear> weight_;
  std::optional<FlagSeries> eps_;
  std::function<Nat(Nat)> modulus_;
  std::string label_;
  Observer observer_;
};

/// 3x-1 on [0,1/3], 0 on [1/3,2/3], 3x-2 on [2/3,1].
inline RepresentedContinuousFunction ivt_base() {
  return {PiecewiseLinear({{0, -1}, {rat(1, 3), 0}, {rat(2, 3), 0}, {1, 1}}), [](Nat k) { return 3 * k + 3; },
          "plateau"};
}

/// The eps series of the counterexample pair: eps = 2^-(max(m,1)-1) for a
/// first zero at m, 0 without one.
inline FlagSeries flag_offset(const PresentedSequence& f) { return {f, EventKind::zero, SeriesMode::after_event}; }

/// f0 + eps (sign > 0) or f0 - eps (sign < 0).
inline RepresentedContinuousFunction ivt_counterexample(const PresentedSequence& f, int sign) {
  const Rational w = sign > 0 ? 1 : -1;
  return ivt_base().with_offset(PiecewiseLinear::constant(w), flag_offset(f),
                                std::string("plateau") + (sign > 0 ? "+" : "-") + "eps(" + f.to_string() + ")");
}

using UivtFunctional = std::function<FastCauchyReal(const RepresentedContinuousFunction&)>;

/// Bisection over [a_n, a_n + 2^-n] with probe a_n + 2^-(n+1); the n-th
/// approximation is the midpoint of the next interval. A probe where f is
/// exactly zero is returned from then on.
inline UivtFunctional uivt_from_mu(MuOperator mu) {
  return [mu = std::move(mu)](const RepresentedContinuousFunction& f) {
    if (compare_by_reads(f(0), 0, mu) >= 0 || compare_by_reads(f(1), 0, mu) <= 0) {
      throw NotInCbar(f.label() + " does not satisfy f(0) < 0 < f(1)");
    }
    struct State {
      std::vector<Rational> left{Rational(0)};
      std::optional<Rational> exact_root;
    };
    auto state = std::make_shared<State>();
    return FastCauchyReal::from_rule(
        [f, mu, state](Nat n) -> Rational {
          while (!state->exact_root && state->left.size() <= n + 1) {
            const Nat step = state->left.size() - 1;
            const Rational probe = state->left.back() + pow2(-static_cast<std::int64_t>(step + 1));
            const int sign = compare_by_reads(f(probe), 0, mu);
            if (sign == 0) {
              state->exact_root = probe;
            } else {
              state->left.push_back(sign < 0 ? probe : state->left.back());
            }
          }
          if (state->exact_root) return *state->exact_root;
          return state->left[n + 1] + pow2(-static_cast<std::int64_t>(n + 2));
        },
        "root(" + f.label() + ")");
  };
}

inline ExtensionalityFunctional<RepresentedContinuousFunction> uivt_xi(UivtFunctional phi) {
  return xi_for<RepresentedContinuousFunction>([phi = std::move(phi)](const RepresentedContinuousFunction& f, Nat k) {
    const auto root = phi(f);
    for (Nat n = 0; n < k; ++n) (void)root.approx(n);
  });
}

/// Largest approximation index k with cantor_pair(0, k) < n (0 when n <= 1).
inline Nat precision_below_code(Nat n) {
  Nat k = 0;
  while (cantor_pair(0, k + 1) < n) ++k;
  return k;
}

/// Root precision used to tell the counterexample roots apart.
inline constexpr Nat kRootPrecision = 4;

inline Extraction extract_via_uivt(const UivtFunctional& phi,
                                   const ExtensionalityFunctional<RepresentedContinuousFunction>& xi,
                                   const PresentedSequence& f) {
  if (auto early = detail::early_zero(f)) return *early;
  const auto plus = ivt_counterexample(f, +1), minus = ivt_counterexample(f, -1);
  // Values carry one guard bit: approximation k differs only for a zero at an index <= k + 1.
  const Nat bound = precision_below_code(xi(plus, minus, kRootPrecision + 1)) + 1;
  const Rational gap = abs(phi(plus).approx(kRootPrecision) - phi(minus).approx(kRootPrecision));
  if (gap <= rat(1, 6)) return {std::nullopt, bound};
  return {detail::bounded_search(f, bound, "root"), bound};
}

inline MuOperator mu_from_uivt(UivtFunctional phi, ExtensionalityFunctional<RepresentedContinuousFunction> xi) {
  return detail::as_mu([phi = std::move(phi), xi = std::move(xi)](const PresentedSequence& f) {
    return extract_via_uivt(phi, xi, f);
  });
}

// ---------------------------------------------------------------------------
// Maximum of a continuous function

/// Two bumps at 1/4 and 3/4. The plus function has heights 1+eps and 1-eps,
/// the minus function 1-eps and 1+eps.
inline std::pair<RepresentedContinuousFunction, RepresentedContinuousFunction> weierstrass_counterexample(
    const PresentedSequence& f) {
  const RepresentedContinuousFunction bumps(
      PiecewiseLinear({{0, 0}, {rat(1, 4), 1}, {rat(1, 2), 0}, {rat(3, 4), 1}, {1, 0}}),
      [](Nat k) { return 8 * k + 8; }, "bumps");
  const auto tilt = [](int sign) {
    return PiecewiseLinear({{0, 0}, {rat(1, 4), sign}, {rat(1, 2), 0}, {rat(3, 4), -sign}, {1, 0}});
  };
  return {bumps.with_offset(tilt(+1), flag_offset(f), "bumps+eps(" + f.to_string() + ")"),
          bumps.with_offset(tilt(-1), flag_offset(f), "bumps-eps(" + f.to_string() + ")")};
}

/// Leftmost breakpoint where a piecewise-linear f attains its maximum, with
/// comparisons decided by `mu`.
inline Rational argmax(const RepresentedContinuousFunction& f, const MuOperator& mu = mu_exact) {
  const auto xs = f.breakpoints();
  Rational best = xs.front();
  for (const auto& x : xs) {
    if (real_lt(f(best), f(x), mu)) best = x;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Rational dichotomy

/// The irrational branch of the dichotomy; no presented real reaches it.
struct Irrational {};

using DqAnswer = std::variant<RationalWitness, Irrational>;
using UdqFunctional = std::function<DqAnswer(const FastCauchyReal&)>;

inline UdqFunctional udq_from_mu(MuOperator mu) {
  return [mu = std::move(mu)](const FastCauchyReal& x) -> DqAnswer {
    const auto& p = x.presentation();
    return RationalWitness{x.exact_value(mu), p.terms.empty() ? Certificate::exact_rational : Certificate::flag_closed_form};
  };
}

/// Decodes q = 1 - 2^-m from the witness for dq_real(f) and returns m, the
/// first index where f is nonzero, after checking it against f.
inline Extraction extract_via_udq(const UdqFunctional& phi, const PresentedSequence& f) {
  const auto answer = phi(dq_real(f));
  const auto* witness = std::get_if<RationalWitness>(&answer);
  if (!witness) throw MalformedWitness("dichotomy answered irrational for " + f.to_string());
  const Rational gap = 1 - witness->value;
  if (gap == 0) return {std::nullopt, 0};
  const Integer num = boost::multiprecision::numerator(gap);
  const Integer den = boost::multiprecision::denominator(gap);
  if (gap < 0 || num != 1 || (den & (den - 1)) != 0) {
    throw MalformedWitness(to_string(witness->value) + " is not of the form 1 - 2^-m");
  }
  const Nat m = boost::multiprecision::msb(den);
  for (Nat i = 0; i < m; ++i) {
    if (f.at(i) != 0) throw MalformedWitness("witness skips the nonzero entry at " + std::to_string(i));
  }
  if (f.at(m) == 0) throw MalformedWitness("witness names a zero entry at " + std::to_string(m));
  return {m, m};
}

/// Least index where f is nonzero, recovered through the dichotomy.
inline MuOperator mu_from_udq(UdqFunctional phi) {
  return detail::as_mu([phi = std::move(phi)](const PresentedSequence& f) { return extract_via_udq(phi, f); });
}

}  // namespace mubench
