#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mubench/error.hpp"
#include "mubench/sequence.hpp"
#include "mubench/trace.hpp"

namespace mubench {

/// Read access to a sequence, index to value.
using SequenceView = std::function<Nat(Nat)>;

inline SequenceView view_of(const PresentedSequence& s) {
  return [s](Nat n) { return s.at(n); };
}

/// Value of one evaluation together with every index it queried.
struct TracedRun {
  Nat value = 0;
  std::set<Nat> queries;
};

/// A type-2 functional whose body reads its argument only through the view
/// it is handed. The body must be deterministic in the answers it receives.
class TracedFunctional {
 public:
  using Body = std::function<Nat(const SequenceView&)>;

  TracedFunctional(std::string name, Body body) : name_(std::move(name)), body_(std::move(body)) {}

  Nat operator()(const SequenceView& f) const { return body_(f); }
  Nat operator()(const PresentedSequence& f) const { return body_(view_of(f)); }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Body body_;
};

/// Runs g once on f, recording the exact set of queried indices.
inline TracedRun eval_traced(const TracedFunctional& g, const SequenceView& f) {
  TracedRun run;
  const SequenceView recording = [&](Nat n) {
    run.queries.insert(n);
    return f(n);
  };
  run.value = g(recording);
  return run;
}

namespace detail {

struct UnansweredQuery {
  Nat index;
};

/// Explores the decision tree of g over binary arguments. Each visitor call
/// receives one complete branch: the answers it consumed and g's value there.
template <class Visit>
void explore_binary_tree(const TracedFunctional& g, Nat budget, Visit&& visit) {
  std::vector<std::map<Nat, Nat>> pending{{}};
  Nat runs = 0;
  while (!pending.empty()) {
    std::map<Nat, Nat> answers = std::move(pending.back());
    pending.pop_back();
    if (++runs > budget) {
      throw BudgetExceeded("fan exploration of '" + g.name() + "' exceeded " + std::to_string(budget) + " runs");
    }
    const SequenceView lookup = [&answers](Nat n) {
      const auto it = answers.find(n);
      if (it == answers.end()) throw UnansweredQuery{n};
      return it->second;
    };
    try {
      const Nat value = g(lookup);
      visit(answers, value);
    } catch (const UnansweredQuery& q) {
      for (Nat bit : {Nat{1}, Nat{0}}) {
        auto forked = answers;
        forked.emplace(q.index, bit);
        pending.push_back(std::move(forked));
      }
    }
  }
}

}  // namespace detail

/// Modulus of uniform continuity of g on Cantor space: one past the largest
/// index queried anywhere in g's decision tree over binary arguments.
inline Nat omega_fan(const TracedFunctional& g, Nat budget = kDefaultBudget) {
  Nat modulus = 0;
  detail::explore_binary_tree(g, budget, [&](const std::map<Nat, Nat>& answers, Nat) {
    if (!answers.empty()) modulus = std::max(modulus, answers.rbegin()->first + 1);
  });
  return modulus;
}

/// All binary strings of the given length, as 0-tail sequences, in
/// length-lexicographic order.
inline std::vector<PresentedSequence> zero_tail_extensions(Nat length, Nat budget = kDefaultBudget) {
  if (length >= 63 || (Nat{1} << length) > budget) {
    throw BudgetExceeded("enumerating 2^" + std::to_string(length) + " strings exceeds the budget");
  }
  std::vector<PresentedSequence> out;
  const Nat count = Nat{1} << length;
  out.reserve(count);
  for (Nat code = 0; code < count; ++code) {
    std::vector<Nat> bits(length);
    for (Nat i = 0; i < length; ++i) bits[i] = (code >> (length - 1 - i)) & 1;
    out.emplace_back(std::move(bits), std::vector<Nat>{0});
  }
  return out;
}

struct SpecialFanResult {
  Nat bound = 0;
  std::vector<PresentedSequence> cover;
};

/// Bound = max of g over 0-tail sequences with a prefix of length omega_fan(g);
/// cover = every 0-tail sequence with a prefix of length bound.
inline SpecialFanResult theta_special(const TracedFunctional& g, Nat budget = kDefaultBudget) {
  const Nat modulus = omega_fan(g, budget);
  SpecialFanResult result;
  for (const auto& alpha : zero_tail_extensions(modulus, budget)) result.bound = std::max(result.bound, g(alpha));
  result.cover = zero_tail_extensions(result.bound, budget);
  return result;
}

/// Wraps an input so that its reads are reported to `observer`. Inputs with
/// an `observed` member use it; plain views are wrapped directly.
template <class Input>
Input observe(const Input& input, Observer observer) {
  return input.observed(std::move(observer));
}

inline SequenceView observe(const SequenceView& input, Observer observer) {
  return [input, observer = std::move(observer)](Nat n) {
    observer(n);
    return input(n);
  };
}

/// One past the largest index read from f or g while `first_outputs(x, k)`
/// produces the first k outputs of the functional on each of them; 0 when
/// nothing is read.
template <class Input, class FirstOutputs>
Nat xi_by_tracing(const FirstOutputs& first_outputs, const Input& f, const Input& g, Nat k,
                  Nat budget = kDefaultBudget) {
  auto log = std::make_shared<QueryLog>(budget);
  first_outputs(observe(f, observer_for(log)), k);
  first_outputs(observe(g, observer_for(log)), k);
  return log->bound();
}

/// Rule (f, g, k) -> N with Phi(f) and Phi(g) agreeing below k whenever f
/// and g agree below N.
template <class Input>
struct ExtensionalityFunctional {
  std::function<Nat(const Input&, const Input&, Nat)> rule;

  Nat operator()(const Input& f, const Input& g, Nat k) const { return rule(f, g, k); }
};

template <class Input, class FirstOutputs>
ExtensionalityFunctional<Input> xi_for(FirstOutputs first_outputs, Nat budget = kDefaultBudget) {
  return {[first_outputs = std::move(first_outputs), budget](const Input& f, const Input& g, Nat k) {
    return xi_by_tracing(first_outputs, f, g, k, budget);
  }};
}

/// phi(f) = 0 iff f has a zero. Only presented sequences can be decided.
class DecisionFunctional {
 public:
  explicit DecisionFunctional(std::function<Nat(const PresentedSequence&)> rule) : rule_(std::move(rule)) {}

  Nat operator()(const PresentedSequence& f) const { return rule_(f); }

  [[noreturn]] Nat operator()(const OpaqueSequence&) const {
    throw UnsupportedPresentation("existence of a zero is undecidable for an opaque sequence");
  }

 private:
  std::function<Nat(const PresentedSequence&)> rule_;
};

inline DecisionFunctional e2_from_mu(MuOperator mu) {
  return DecisionFunctional([mu = std::move(mu)](const PresentedSequence& f) { return mu(f) ? Nat{0} : Nat{1}; });
}

/// Least zero via phi: phi guarantees the scan terminates when it says yes.
inline MuOperator mu_from_e2(DecisionFunctional phi) {
  return [phi = std::move(phi)](const PresentedSequence& f) -> std::optional<Nat> {
    if (phi(f) != 0) return std::nullopt;
    for (Nat n = 0;; ++n) {
      if (f.at(n) == 0) return n;
    }
  };
}

namespace detail {

inline Nat parse_nat(std::string_view text, std::string_view whole) {
  Nat v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError("bad number '" + std::string(text) + "' in functional '" + std::string(whole) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace detail

/// Built-in catalog:
///   f0+f3+2     sum of queried positions and literals
///   proj:K      f(K)
///   const:N     N, no queries
///   search:K    least i < K with f(i) != 0, else K
///   cond:A:B:C  f(B) if f(A) != 0, else f(C)
inline TracedFunctional parse_functional(std::string_view text) {
  const auto fields = detail::split(text, ':');
  const auto head = fields.front();
  const auto arity = [&](std::size_t n) {
    if (fields.size() != n + 1) throw ParseError("functional '" + std::string(text) + "' expects " + std::to_string(n) + " argument(s)");
  };
  const std::string name(text);
  if (head == "proj") {
    arity(1);
    const Nat k = detail::parse_nat(fields[1], text);
    return {name, [k](const SequenceView& f) { return f(k); }};
  }
  if (head == "const") {
    arity(1);
    const Nat c = detail::parse_nat(fields[1], text);
    return {name, [c](const SequenceView&) { return c; }};
  }
  if (head == "search") {
    arity(1);
    const Nat k = detail::parse_nat(fields[1], text);
    return {name, [k](const SequenceView& f) {
              for (Nat i = 0; i < k; ++i) {
                if (f(i) != 0) return i;
              }
              return k;
            }};
  }
  if (head == "cond") {
    arity(3);
    const Nat a = detail::parse_nat(fields[1], text), b = detail::parse_nat(fields[2], text),
              c = detail::parse_nat(fields[3], text);
    return {name, [a, b, c](const SequenceView& f) { return f(a) != 0 ? f(b) : f(c); }};
  }
  if (fields.size() != 1) throw ParseError("unknown functional '" + name + "'");
  std::vector<Nat> positions;
  Nat offset = 0;
  for (const auto term : detail::split(text, '+')) {
    if (!term.empty() && term.front() == 'f') {
      positions.push_back(detail::parse_nat(term.substr(1), text));
    } else {
      offset += detail::parse_nat(term, text);
    }
  }
  return {name, [positions, offset](const SequenceView& f) {
            Nat sum = offset;
            for (Nat p : positions) sum += f(p);
            return sum;
          }};
}

}  // namespace mubench
