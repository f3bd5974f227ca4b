#pragma once

#include <bit>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mubench/error.hpp"
#include "mubench/functionals.hpp"
#include "mubench/sequence.hpp"
#include "mubench/trace.hpp"

namespace mubench {

/// A finite binary string of length at most 62, most significant bit first.
struct BitString {
  Nat bits = 0;
  Nat length = 0;

  static constexpr Nat kMaxLength = 62;

  static BitString parse(std::string_view text) {
    if (text.size() > kMaxLength) throw ParseError("bit string longer than 62");
    BitString s;
    for (char c : text) {
      if (c != '0' && c != '1') throw ParseError("bad bit '" + std::string(1, c) + "' in '" + std::string(text) + "'");
      s = s.extended(c == '1');
    }
    return s;
  }

  /// Length-lexicographic position: all shorter strings come first.
  static BitString from_code(Nat code) {
    const Nat length = std::bit_width(code + 1) - 1;
    return {code + 1 - (Nat{1} << length), length};
  }

  Nat code() const { return (Nat{1} << length) - 1 + bits; }

  bool at(Nat i) const { return (bits >> (length - 1 - i)) & 1; }

  BitString extended(bool bit) const {
    if (length >= kMaxLength) throw OutOfRange("bit string longer than 62");
    return {(bits << 1) | Nat{bit}, length + 1};
  }

  BitString prefix(Nat n) const { return n >= length ? *this : BitString{bits >> (length - n), n}; }

  std::string to_string() const {
    std::string out;
    for (Nat i = 0; i < length; ++i) out += at(i) ? '1' : '0';
    return out;
  }

  bool operator==(const BitString&) const = default;
};

/// Binary trees from a closed family with exact level counts and exact
/// extensibility decisions:
///   full                      every string
///   flagtree:i:<seq>          sigma(0) = i, or sigma(0) = 1-i and |sigma| below the first zero of seq
///   path:<bits>               prefixes of bits followed by zeros
///   path:<bits>+full@L        the path up to level L, everything above its level-L node
///   truncate:L:<tree>         members of tree with length <= L
/// Opaque trees carry only a membership rule.
class PresentedTree {
 public:
  enum class Kind { full, flag, path, truncate, opaque };

  static PresentedTree full() { return PresentedTree(Kind::full); }

  static PresentedTree flag_tree(Nat branch, PresentedSequence flag) {
    if (branch > 1) throw ParseError("flagtree branch must be 0 or 1");
    PresentedTree t(Kind::flag);
    t.branch_ = branch;
    t.flag_ = std::move(flag);
    return t;
  }

  static PresentedTree path(BitString bits, std::optional<Nat> full_at = std::nullopt) {
    PresentedTree t(Kind::path);
    t.path_ = bits;
    t.full_at_ = full_at;
    return t;
  }

  static PresentedTree truncate(Nat level, PresentedTree inner) {
    PresentedTree t(Kind::truncate);
    t.level_ = level;
    t.inner_ = std::make_shared<const PresentedTree>(std::move(inner));
    return t;
  }

  static PresentedTree opaque(std::function<bool(const BitString&)> rule, std::string label) {
    PresentedTree t(Kind::opaque);
    t.rule_ = std::move(rule);
    t.label_ = std::move(label);
    return t;
  }

  static PresentedTree parse(std::string_view text);

  Kind kind() const { return kind_; }

  /// Membership, reported to the attached observer as a code index.
  bool contains(const BitString& s) const {
    if (observer_) observer_(s.code());
    return contains_unobserved(s);
  }

  bool contains_code(Nat code) const { return contains(BitString::from_code(code)); }

  bool contains_unobserved(const BitString& s) const {
    switch (kind_) {
      case Kind::full:
        return true;
      case Kind::flag: {
        return s.length == 0 || s.at(0) == (branch_ == 1) || !zero_up_to(s.length);
      }
      case Kind::path: {
        const Nat on_path = full_at_ ? std::min(s.length, *full_at_) : s.length;
        return s.prefix(on_path) == path_prefix(on_path);
      }
      case Kind::truncate:
        return s.length <= level_ && inner_->contains_unobserved(s);
      case Kind::opaque:
        return rule_(s);
    }
    return false;
  }

  /// Number of members of length n.
  Nat level_count(Nat n) const {
    if (n > BitString::kMaxLength) throw OutOfRange("level above 62");
    switch (kind_) {
      case Kind::full:
        return Nat{1} << n;
      case Kind::flag: {
        if (n == 0) return 1;
        const Nat half = Nat{1} << (n - 1);
        return half + (zero_up_to(n) ? 0 : half);
      }
      case Kind::path:
        return full_at_ && n > *full_at_ ? Nat{1} << (n - *full_at_) : 1;
      case Kind::truncate:
        return n <= level_ ? inner_->level_count(n) : 0;
      case Kind::opaque: {
        Nat count = 0;
        for (Nat b = 0; b < (Nat{1} << n); ++b) count += rule_(BitString{b, n}) ? 1 : 0;
        return count;
      }
    }
    return 0;
  }

  /// Least level at or above |s| with no member extending s, or none when s
  /// has members at every level. First events are decided by `mu`.
  std::optional<Nat> dead_level(const BitString& s, const MuOperator& mu) const {
    if (!contains_unobserved(s)) return s.length;
    switch (kind_) {
      case Kind::full:
      case Kind::path:
        return std::nullopt;
      case Kind::flag: {
        if (s.length == 0 || s.at(0) == (branch_ == 1)) return std::nullopt;
        const auto m = mu(*flag_);
        return m ? std::optional<Nat>(std::max(s.length, *m)) : std::nullopt;
      }
      case Kind::truncate: {
        const auto inner = inner_->dead_level(s, mu);
        return inner ? std::min(*inner, level_ + 1) : level_ + 1;
      }
      case Kind::opaque:
        break;
    }
    throw UnsupportedFamily("extensibility of opaque tree '" + label_ + "'");
  }

  /// Level from which greedy path choices no longer change.
  Nat structure_depth() const {
    switch (kind_) {
      case Kind::full:
        return 0;
      case Kind::flag:
        return 1;
      case Kind::path:
        return std::max(path_.length, full_at_.value_or(0));
      case Kind::truncate:
        return level_ + 1;
      case Kind::opaque:
        break;
    }
    throw UnsupportedFamily("structure of opaque tree '" + label_ + "'");
  }

  /// Least k with level_count(n) / 2^n >= 1/k at every level, when the
  /// measure is positive.
  std::optional<Nat> measure_witness(const MuOperator& mu = mu_exact) const {
    switch (kind_) {
      case Kind::full:
        return 1;
      case Kind::flag:
        return mu(*flag_) ? 2 : 1;
      case Kind::path:
        if (!full_at_) return std::nullopt;
        if (*full_at_ > BitString::kMaxLength) throw OutOfRange("full subtree level above 62");
        return Nat{1} << *full_at_;
      case Kind::truncate:
        return std::nullopt;
      case Kind::opaque:
        break;
    }
    throw UnsupportedFamily("measure of opaque tree '" + label_ + "'");
  }

  bool measure_positive(const MuOperator& mu = mu_exact) const { return measure_witness(mu).has_value(); }

  /// Characteristic sequence under the length-lexicographic coding.
  SequenceView characteristic() const {
    return [tree = *this](Nat code) { return tree.contains_code(code) ? Nat{1} : Nat{0}; };
  }

  PresentedTree observed(Observer observer) const {
    PresentedTree copy = *this;
    copy.observer_ = std::move(observer);
    return copy;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::full:
        return "full";
      case Kind::flag:
        return "flagtree:" + std::to_string(branch_) + ":" + flag_->to_string();
      case Kind::path:
        return "path:" + path_.to_string() + (full_at_ ? "+full@" + std::to_string(*full_at_) : "");
      case Kind::truncate:
        return "truncate:" + std::to_string(level_) + ":" + inner_->to_string();
      case Kind::opaque:
        return "opaque(" + label_ + ")";
    }
    return {};
  }

 private:
  explicit PresentedTree(Kind kind) : kind_(kind) {}

  bool zero_up_to(Nat n) const {
    for (Nat m = 0; m <= n; ++m) {
      if (flag_->at(m) == 0) return true;
    }
    return false;
  }

  BitString path_prefix(Nat n) const {
    if (n <= path_.length) return path_.prefix(n);
    return {path_.bits << (n - path_.length), n};
  }

  Kind kind_;
  Nat branch_ = 0;
  std::optional<PresentedSequence> flag_;
  BitString path_;
  std::optional<Nat> full_at_;
  Nat level_ = 0;
  std::shared_ptr<const PresentedTree> inner_;
  std::function<bool(const BitString&)> rule_;
  std::string label_;
  Observer observer_;
};

inline PresentedTree PresentedTree::parse(std::string_view text) {
  const auto fail = [&](const std::string& why) -> ParseError {
    return ParseError("tree '" + std::string(text) + "': " + why);
  };
  const auto number_then_rest = [&](std::string_view body) {
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw fail("expected ':'");
    return std::pair{detail::parse_nat(body.substr(0, colon), text), body.substr(colon + 1)};
  };
  if (text == "full") return full();
  if (text.starts_with("flagtree:")) {
    const auto [branch, seq] = number_then_rest(text.substr(9));
    return flag_tree(branch, PresentedSequence::parse(seq));
  }
  if (text.starts_with("truncate:")) {
    const auto [level, inner] = number_then_rest(text.substr(9));
    return truncate(level, parse(inner));
  }
  if (text.starts_with("path:")) {
    const auto body = text.substr(5);
    const auto plus = body.find('+');
    if (plus == std::string_view::npos) return path(BitString::parse(body));
    const auto rest = body.substr(plus + 1);
    if (!rest.starts_with("full@")) throw fail("expected '+full@<level>'");
    return path(BitString::parse(body.substr(0, plus)), detail::parse_nat(rest.substr(5), text));
  }
  throw fail("unknown tree family");
}

/// Outcome of checking the special-fan property of Theta for one (g, T).
struct ScfReport {
  Nat bound = 0;
  Nat cover_size = 0;
  bool antecedent = false;
  bool consequent = false;
  bool implication = false;
};

/// Antecedent: every cover element leaves T within g(alpha) bits.
/// Consequent: T has no node at level `bound`.
inline ScfReport scf_check(const TracedFunctional& g, const PresentedTree& tree, Nat budget = kDefaultBudget) {
  const auto theta = theta_special(g, budget);
  ScfReport report;
  report.bound = theta.bound;
  report.cover_size = theta.cover.size();
  report.antecedent = true;
  for (const auto& alpha : theta.cover) {
    const Nat cut = g(alpha);
    BitString prefix;
    for (Nat i = 0; i < cut; ++i) prefix = prefix.extended(alpha.at(i) != 0);
    if (tree.contains(prefix)) {
      report.antecedent = false;
      break;
    }
  }
  report.consequent = tree.level_count(theta.bound) == 0;
  report.implication = !report.antecedent || report.consequent;
  return report;
}

}  // namespace mubench
