#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mubench/error.hpp"

namespace mubench {

using Nat = std::uint64_t;

/// A total function N -> N given by a finite prefix followed by a periodic
/// tail. Values are always stored in canonical form: the tail has minimal
/// period and the prefix minimal length, so two sequences are extensionally
/// equal exactly when their stored forms are identical.
class PresentedSequence {
 public:
  PresentedSequence() : tail_{0} {}

  PresentedSequence(std::vector<Nat> prefix, std::vector<Nat> tail)
      : prefix_(std::move(prefix)), tail_(std::move(tail)) {
    if (tail_.empty()) {
      throw ParseError("sequence tail must be nonempty");
    }
    canonicalize();
  }

  static PresentedSequence constant(Nat value) { return {{}, {value}}; }

  /// The sequence that is `value` at `index` and `fill` everywhere else.
  static PresentedSequence single(Nat index, Nat value, Nat fill = 1) {
    std::vector<Nat> prefix(index + 1, fill);
    prefix[index] = value;
    return {std::move(prefix), {fill}};
  }

  /// Parses `prefix=[a,b,...];tail=[c,...]`, ignoring whitespace.
  static PresentedSequence parse(std::string_view text);

  Nat operator()(Nat n) const { return at(n); }

  Nat at(Nat n) const {
    if (n < prefix_.size()) return prefix_[n];
    return tail_[(n - prefix_.size()) % tail_.size()];
  }

  const std::vector<Nat>& prefix() const { return prefix_; }
  const std::vector<Nat>& tail() const { return tail_; }

  /// Number of indices that determine the whole sequence.
  Nat span() const { return prefix_.size() + tail_.size(); }

  std::string to_string() const;

  friend bool operator==(const PresentedSequence&, const PresentedSequence&) = default;

 private:
  void canonicalize();

  std::vector<Nat> prefix_;
  std::vector<Nat> tail_;
};

inline void PresentedSequence::canonicalize() {
  const std::size_t len = tail_.size();
  for (std::size_t p = 1; p <= len; ++p) {
    if (len % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < len && periodic; ++i) periodic = tail_[i] == tail_[i % p];
    if (periodic) {
      tail_.resize(p);
      break;
    }
  }
  // Absorb trailing prefix entries into the period by rotating it right.
  while (!prefix_.empty() && prefix_.back() == tail_.back()) {
    prefix_.pop_back();
    std::rotate(tail_.rbegin(), tail_.rbegin() + 1, tail_.rend());
  }
}

namespace detail {

inline void append_list(std::ostringstream& out, const std::vector<Nat>& xs) {
  out << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ',';
    out << xs[i];
  }
  out << ']';
}

class Cursor {
 public:
  explicit Cursor(std::string text) : text_(std::move(text)) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  void expect(std::string_view word) {
    if (text_.compare(pos_, word.size(), word) != 0) {
      fail("expected '" + std::string(word) + "'");
    }
    pos_ += word.size();
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  Nat number() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a natural number");
    Nat value = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      const Nat digit = static_cast<Nat>(text_[pos_++] - '0');
      if (value > (UINT64_MAX - digit) / 10) fail("natural number overflows 64 bits");
      value = value * 10 + digit;
    }
    return value;
  }

  std::vector<Nat> list() {
    expect("[");
    std::vector<Nat> out;
    if (accept(']')) return out;
    do {
      out.push_back(number());
    } while (accept(','));
    expect("]");
    return out;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(why + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PresentedSequence PresentedSequence::parse(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  detail::Cursor in(compact);
  in.expect("prefix=");
  auto prefix = in.list();
  in.expect(";");
  in.expect("tail=");
  auto tail = in.list();
  if (!in.done()) in.fail("trailing input");
  if (tail.empty()) in.fail("empty tail");
  return {std::move(prefix), std::move(tail)};
}

inline std::string PresentedSequence::to_string() const {
  std::ostringstream out;
  out << "prefix=";
  detail::append_list(out, prefix_);
  out << ";tail=";
  detail::append_list(out, tail_);
  return out.str();
}

inline std::ostream& operator<<(std::ostream& os, const PresentedSequence& s) {
  return os << s.to_string();
}

/// A sequence known only through its evaluator. Totality is assumed.
class OpaqueSequence {
 public:
  explicit OpaqueSequence(std::function<Nat(Nat)> evaluator) : eval_(std::move(evaluator)) {}
  explicit OpaqueSequence(const PresentedSequence& s) : eval_([s](Nat n) { return s.at(n); }) {}

  Nat operator()(Nat n) const { return eval_(n); }

 private:
  std::function<Nat(Nat)> eval_;
};

/// Least zero of a presented sequence; exact because the prefix and one
/// period decide the whole sequence.
inline std::optional<Nat> mu_exact(const PresentedSequence& f) {
  for (Nat n = 0; n < f.span(); ++n) {
    if (f.at(n) == 0) return n;
  }
  return std::nullopt;
}

/// Result of a bounded search. `none_below_budget` says nothing about
/// indices at or past the budget.
struct BudgetedSearch {
  bool found = false;
  Nat index = 0;

  static BudgetedSearch none_below_budget() { return {}; }
  static BudgetedSearch at(Nat n) { return {true, n}; }
  friend bool operator==(const BudgetedSearch&, const BudgetedSearch&) = default;
};

inline BudgetedSearch mu_budgeted(const OpaqueSequence& f, Nat budget) {
  for (Nat n = 0; n < budget; ++n) {
    if (f(n) == 0) return BudgetedSearch::at(n);
  }
  return BudgetedSearch::none_below_budget();
}

enum class PointwiseOp { add, mul, max, min, eq, neq };

inline Nat apply_op(PointwiseOp op, Nat a, Nat b) {
  switch (op) {
    case PointwiseOp::add: return a + b;
    case PointwiseOp::mul: return a * b;
    case PointwiseOp::max: return std::max(a, b);
    case PointwiseOp::min: return std::min(a, b);
    case PointwiseOp::eq: return a == b ? 1 : 0;
    case PointwiseOp::neq: return a != b ? 1 : 0;
  }
  return 0;
}

inline PresentedSequence pointwise_combine(PointwiseOp op, const PresentedSequence& a,
                                           const PresentedSequence& b) {
  const std::size_t start = std::max(a.prefix().size(), b.prefix().size());
  const std::size_t period = std::lcm(a.tail().size(), b.tail().size());
  std::vector<Nat> prefix, tail;
  prefix.reserve(start);
  tail.reserve(period);
  for (std::size_t n = 0; n < start; ++n) prefix.push_back(apply_op(op, a.at(n), b.at(n)));
  for (std::size_t n = start; n < start + period; ++n) tail.push_back(apply_op(op, a.at(n), b.at(n)));
  return {std::move(prefix), std::move(tail)};
}

inline PresentedSequence shift(const PresentedSequence& s, Nat k) {
  const auto& prefix = s.prefix();
  if (k < prefix.size()) {
    return {std::vector<Nat>(prefix.begin() + static_cast<std::ptrdiff_t>(k), prefix.end()), s.tail()};
  }
  auto tail = s.tail();
  const Nat rot = (k - prefix.size()) % tail.size();
  std::rotate(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(rot), tail.end());
  return {{}, std::move(tail)};
}

/// Indicator that is 0 exactly where `f` is nonzero, so `mu_exact` on it finds
/// the first nonzero entry of `f`.
inline PresentedSequence zero_indicator(const PresentedSequence& f) {
  return pointwise_combine(PointwiseOp::eq, f, PresentedSequence::constant(0));
}

/// A mu operation on presented sequences. `mu_exact` is the canonical one;
/// the extractors build others from discontinuous functionals.
using MuOperator = std::function<std::optional<Nat>(const PresentedSequence&)>;

}  // namespace mubench
