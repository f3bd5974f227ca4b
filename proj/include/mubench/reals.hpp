#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mubench/error.hpp"
#include "mubench/rational.hpp"
#include "mubench/sequence.hpp"
#include "mubench/trace.hpp"

namespace mubench {

/// Which entries of a flag sequence count as an event.
enum class EventKind {
  zero,     ///< f(i) = 0 fires (mu-search convention)
  nonzero,  ///< f(i) != 0 fires
};

/// How a flag sequence drives the digits c_1, c_2, ... of a dyadic series.
enum class SeriesMode {
  after_event,   ///< c_n = 1 iff some event occurs at an index <= n
  before_event,  ///< c_n = 1 iff no event occurs at an index < n
};

/// The series sum_{n>=1} c_n 2^-n with digits read off a presented flag.
struct FlagSeries {
  PresentedSequence flag;
  EventKind event = EventKind::zero;
  SeriesMode mode = SeriesMode::after_event;

  bool fires(Nat i) const {
    const bool zero = flag.at(i) == 0;
    return event == EventKind::zero ? zero : !zero;
  }

  /// First event at an index <= limit, by direct scan.
  std::optional<Nat> scan(Nat limit) const {
    for (Nat i = 0; i <= limit; ++i) {
      if (fires(i)) return i;
    }
    return std::nullopt;
  }

  /// First event anywhere, decided with a mu operation.
  std::optional<Nat> first_event(const MuOperator& mu) const {
    return event == EventKind::zero ? mu(flag) : mu(zero_indicator(flag));
  }

  /// Closed-form sum when the first event is `first` (or never).
  Rational value_given(std::optional<Nat> first) const {
    if (mode == SeriesMode::after_event) {
      if (!first) return 0;
      return pow2(1 - static_cast<std::int64_t>(std::max<Nat>(*first, 1)));
    }
    if (!first) return 1;
    return 1 - pow2(-static_cast<std::int64_t>(*first));
  }

  std::string describe() const {
    return std::string("flag(") + flag.to_string() + "," +
           (event == EventKind::zero ? "zero" : "nonzero") + "," +
           (mode == SeriesMode::after_event ? "after" : "before") + ")";
  }
};

/// Symbolic description of a real: constant + sum of scaled flag series.
struct Presentation {
  Rational constant;
  std::vector<std::pair<Rational, FlagSeries>> terms;
};

/// A fast-converging Cauchy sequence of rationals, |q_n - q_{n+i}| < 2^-n.
///
/// Reals built from presentations support exact equality decisions; reals
/// built from a bare approximation rule (e.g. bisection limits) only support
/// approximation and strict-order witnesses.
class FastCauchyReal {
 public:
  FastCauchyReal() : FastCauchyReal(Rational(0)) {}

  explicit FastCauchyReal(Rational value) : presentation_(Presentation{std::move(value), {}}) {}

  explicit FastCauchyReal(Presentation p) : presentation_(std::move(p)) {}

  static FastCauchyReal from_rule(std::function<Rational(Nat)> rule, std::string label) {
    FastCauchyReal x;
    x.presentation_.reset();
    x.rule_ = std::move(rule);
    x.label_ = std::move(label);
    return x;
  }

  static FastCauchyReal from_series(FlagSeries s, Rational coeff = 1, Rational constant = 0) {
    Presentation p{std::move(constant), {}};
    p.terms.emplace_back(std::move(coeff), std::move(s));
    return FastCauchyReal(std::move(p));
  }

  bool is_presented() const { return presentation_.has_value(); }

  const Presentation& presentation() const {
    if (!presentation_) throw UnsupportedPresentation("real '" + label_ + "' has no symbolic presentation");
    return *presentation_;
  }

  /// q_k. Reports the read to the attached observer, if any.
  Rational approx(Nat k) const {
    if (observer_) observer_(k);
    return approx_unobserved(k);
  }

  Rational approx_unobserved(Nat k) const {
    if (!presentation_) return rule_(k);
    const Nat reach = k + guard_bits();
    Rational q = presentation_->constant;
    for (const auto& [coeff, series] : presentation_->terms) {
      q += coeff * series.value_given(series.scan(reach));
    }
    return q;
  }

  /// Index from which every approximation equals the exact value.
  Nat stable_index(const MuOperator& mu) const {
    const Nat s = guard_bits();
    Nat k = 0;
    for (const auto& [coeff, series] : presentation().terms) {
      if (auto m = series.first_event(mu); m && *m > s) k = std::max(k, *m - s);
    }
    return k;
  }

  /// Exact value; every real in the presented class is rational.
  Rational exact_value(const MuOperator& mu) const {
    const auto& p = presentation();
    Rational v = p.constant;
    for (const auto& [coeff, series] : p.terms) v += coeff * series.value_given(series.first_event(mu));
    return v;
  }

  /// Copy whose approximation reads are reported to `observer`.
  FastCauchyReal observed(Observer observer) const {
    FastCauchyReal copy = *this;
    copy.observer_ = std::move(observer);
    return copy;
  }

  std::string describe() const {
    if (!presentation_) return "rule(" + label_ + ")";
    std::string out = to_string(presentation_->constant);
    for (const auto& [coeff, series] : presentation_->terms) {
      out += (coeff < 0 ? " - " : " + ");
      const Rational mag = abs(coeff);
      if (mag != 1) out += to_string(mag) + "*";
      out += series.describe();
    }
    return out;
  }

  friend FastCauchyReal operator+(const FastCauchyReal& a, const FastCauchyReal& b) {
    Presentation p = a.presentation();
    const auto& q = b.presentation();
    p.constant += q.constant;
    p.terms.insert(p.terms.end(), q.terms.begin(), q.terms.end());
    return FastCauchyReal(std::move(p));
  }

  friend FastCauchyReal operator*(const Rational& c, const FastCauchyReal& a) {
    Presentation p = a.presentation();
    p.constant *= c;
    for (auto& term : p.terms) term.first *= c;
    std::erase_if(p.terms, [](const auto& t) { return t.first == 0; });
    return FastCauchyReal(std::move(p));
  }

  friend FastCauchyReal operator-(const FastCauchyReal& a) { return Rational(-1) * a; }
  friend FastCauchyReal operator-(const FastCauchyReal& a, const FastCauchyReal& b) { return a + (-b); }
  friend FastCauchyReal operator+(const FastCauchyReal& a, const Rational& c) { return a + FastCauchyReal(c); }

 private:
  /// Extra series terms summed so the scaled tails stay below 2^-k.
  Nat guard_bits() const {
    Rational weight = 0;
    for (const auto& term : presentation_->terms) weight += abs(term.first);
    Nat s = 0;
    while (pow2(static_cast<std::int64_t>(s)) <= weight) ++s;
    return s;
  }

  std::optional<Presentation> presentation_;
  std::function<Rational(Nat)> rule_;
  std::string label_;
  Observer observer_;
};

inline FastCauchyReal from_rational(Rational q) { return FastCauchyReal(std::move(q)); }

/// The pair (1/2 - d, 1/2 + d) with d = sum_{n>=1} c_n 2^-n and c_n = 1 iff
/// f has a zero at some index <= n. Equal exactly when f never hits zero.
inline std::pair<FastCauchyReal, FastCauchyReal> counterexample_pair(const PresentedSequence& f) {
  const FlagSeries delta{f, EventKind::zero, SeriesMode::after_event};
  return {FastCauchyReal::from_series(delta, -1, rat(1, 2)), FastCauchyReal::from_series(delta, 1, rat(1, 2))};
}

/// x = sum_{n>=1} h(n) 2^-n with h(n) = 1 iff f(i) = 0 for all i < n.
/// Equals 1 when f is never nonzero and 1 - 2^-m when f first goes nonzero at m.
inline FastCauchyReal dq_real(const PresentedSequence& f) {
  return FastCauchyReal::from_series(FlagSeries{f, EventKind::nonzero, SeriesMode::before_event});
}

inline bool real_eq(const FastCauchyReal& x, const FastCauchyReal& y, const MuOperator& mu = mu_exact) {
  return (x - y).exact_value(mu) == 0;
}

/// Decides x < y. After equality is ruled out, searches the approximations
/// for n with q_n + 2^(1-n) < r_n (or the reverse gap); one of them exists.
inline bool real_lt(const FastCauchyReal& x, const FastCauchyReal& y, const MuOperator& mu = mu_exact) {
  if (real_eq(x, y, mu)) return false;
  for (Nat n = 1;; ++n) {
    const Rational q = x.approx(n), r = y.approx(n);
    const Rational gap = pow2(1 - static_cast<std::int64_t>(n));
    if (q + gap < r) return true;
    if (r + gap < q) return false;
  }
}

inline bool real_le(const FastCauchyReal& x, const FastCauchyReal& y, const MuOperator& mu = mu_exact) {
  return !real_lt(y, x, mu);
}

/// Three-way comparison of x against a rational that reads x only through
/// its approximations, with `mu` deciding both Sigma-0-1 order conditions.
/// The presentation tells how many approximations settle the answer; the
/// answer itself comes from mu applied to sequences built from the reads.
inline int compare_by_reads(const FastCauchyReal& x, const Rational& c, const MuOperator& mu) {
  const Nat settle = x.stable_index(mu);
  const Rational exact = x.exact_value(mu);
  Nat reads = std::max<Nat>(settle, 1);
  if (exact != c) {
    const Rational gap = abs(exact - c);
    Nat g = 1;
    while (pow2(1 - static_cast<std::int64_t>(g)) >= gap) ++g;
    reads = std::max(reads, g);
  }
  std::vector<Nat> below{1}, above{1};
  for (Nat n = 1; n <= reads; ++n) {
    const Rational q = x.approx(n);
    const Rational slack = pow2(1 - static_cast<std::int64_t>(n));
    below.push_back(q + slack < c ? 0 : 1);
    above.push_back(q - slack > c ? 0 : 1);
  }
  const Nat below_tail = below.back(), above_tail = above.back();
  below.pop_back();
  above.pop_back();
  if (mu(PresentedSequence(below, {below_tail}))) return -1;
  if (mu(PresentedSequence(above, {above_tail}))) return 1;
  return 0;
}

enum class Certificate { exact_rational, flag_closed_form };

inline std::string to_string(Certificate c) {
  return c == Certificate::exact_rational ? "exact-rational" : "flag-closed-form";
}

/// A rational q with q = x, tagged with the presentation rule that proved it.
struct RationalWitness {
  Rational value;
  Certificate certificate = Certificate::exact_rational;
};

}  // namespace mubench
