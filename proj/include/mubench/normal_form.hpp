#pragma once

#include <set>
#include <string>
#include <vector>

#include "mubench/formula.hpp"

namespace mubench {

/// Child indices from the root down to a subformula.
using Path = std::vector<std::size_t>;

enum class Soundness { equivalence, implication };

inline const char* to_string(Soundness s) { return s == Soundness::equivalence ? "equivalence" : "implication"; }

/// One rewrite: the rule, where it fired, and the subformula at that path
/// before and after.
struct RuleStep {
  std::string rule;
  Path path;
  Formula before;
  Formula after;
  Soundness direction = Soundness::equivalence;
};

namespace detail {

inline const Formula& subformula(const Formula& root, const Path& path) {
  const Formula* f = &root;
  for (const auto i : path) {
    if (i >= f->kids.size()) throw NotNormalizable("path leaves the formula");
    f = &f->kids[i];
  }
  return *f;
}

inline Formula& subformula(Formula& root, const Path& path) {
  Formula* f = &root;
  for (const auto i : path) {
    if (i >= f->kids.size()) throw NotNormalizable("path leaves the formula");
    f = &f->kids[i];
  }
  return *f;
}

inline Path child(Path p, std::size_t i) {
  p.push_back(i);
  return p;
}

inline Op dual(Op q) { return q == Op::forall ? Op::exists : Op::forall; }

inline Type block_type(const std::vector<Binder>& binders) {
  std::vector<Type> types;
  for (const auto& b : binders) types.push_back(b.type);
  return Type::tuple(std::move(types));
}

inline std::vector<Term> block_terms(const std::vector<Binder>& binders) {
  std::vector<Term> out;
  for (const auto& b : binders) out.push_back(Term::name(b.name));
  return out;
}

/// Renames binders of `binders` that appear in `avoid` (or among earlier
/// binders) to fresh names, updating `body` to match.
inline void freshen(std::vector<Binder>& binders, Formula& body, const std::set<std::string>& avoid,
                    std::set<std::string>& taken) {
  for (auto& b : binders) {
    if (!avoid.count(b.name)) continue;
    const std::string name = fresh_name(b.name, taken);
    taken.insert(name);
    body = rename_free(body, b.name, name);
    b.name = name;
  }
}

class Rewriter {
 public:
  explicit Rewriter(const Formula& root) { collect_names(root, taken_); }

  Formula apply(const std::string& rule, const Formula& node) {
    if (rule.starts_with("R1-pull:")) return pull(node, std::stoul(rule.substr(8)));
    if (rule == "R1-commute") return commute(node);
    if (rule == "R2-herbrandize") return herbrandize(node);
    if (rule == "R3-antecedent-st-drop") return drop_st(node);
    if (rule == "R4-merge") return merge(node);
    if (rule == "R4-idealise") return idealise(node);
    throw NotNormalizable("unknown rule '" + rule + "'");
  }

 private:
  [[noreturn]] static void mismatch(const std::string& rule, const Formula& node) {
    throw NotNormalizable(rule + " does not apply to " + node.to_string());
  }

  /// (C ... (Q st X A) ...) to (Q' st X (C ... A ...)), Q' dual under negation
  /// and in an antecedent.
  Formula pull(const Formula& node, std::size_t i) {
    const bool connective = node.op == Op::negation || node.op == Op::conjunction || node.op == Op::disjunction ||
                            node.op == Op::implication;
    if (!connective || i >= node.kids.size() || !node.kids[i].is_quantifier() || !node.kids[i].standard) {
      mismatch("R1-pull", node);
    }
    const Formula& kid = node.kids[i];
    std::set<std::string> avoid;
    for (std::size_t j = 0; j < node.kids.size(); ++j) {
      if (j == i) continue;
      for (const auto& b : kid.binders) {
        if (occurs_free(node.kids[j], b.name)) avoid.insert(b.name);
      }
    }
    auto binders = kid.binders;
    Formula body = kid.body();
    freshen(binders, body, avoid, taken_);
    Formula inner = node;
    inner.kids[i] = std::move(body);
    const bool flip = node.op == Op::negation || (node.op == Op::implication && i == 0);
    return Formula::quantifier(flip ? dual(kid.op) : kid.op, true, std::move(binders), std::move(inner));
  }

  /// (all x (all st U A)) to (all st U (all x A)); likewise for ex.
  Formula commute(const Formula& node) {
    if (!node.is_quantifier() || node.standard || !node.body().is_standard(node.op)) mismatch("R1-commute", node);
    const Formula& inner = node.body();
    std::set<std::string> avoid;
    for (const auto& b : node.binders) avoid.insert(b.name);
    auto binders = inner.binders;
    Formula body = inner.body();
    freshen(binders, body, avoid, taken_);
    return Formula::quantifier(node.op, true, std::move(binders),
                               Formula::quantifier(node.op, false, node.binders, std::move(body)));
  }

  /// (all st U (ex st E A)) to (ex st h (all st U (ex-in E (app h U) A))).
  Formula herbrandize(const Formula& node) {
    if (!node.is_standard(Op::forall) || !node.body().is_standard(Op::exists) || !is_internal(node.body().body())) {
      mismatch("R2-herbrandize", node);
    }
    const auto& universal = node.binders;
    const Formula& inner = node.body();
    const std::string h = fresh_name("h", taken_);
    taken_.insert(h);
    const Type type = Type::arrow(block_type(universal), Type::seq(block_type(inner.binders)));
    Formula bounded = Formula::bounded_exists(inner.binders, Term::apply(h, block_terms(universal)), inner.body());
    return Formula::quantifier(Op::exists, true, {{h, type}},
                               Formula::quantifier(Op::forall, true, universal, std::move(bounded)));
  }

  /// (all st U A) to (all U A), A internal.
  static Formula drop_st(const Formula& node) {
    if (!node.is_standard(Op::forall) || !is_internal(node.body())) mismatch("R3-antecedent-st-drop", node);
    Formula out = node;
    out.standard = false;
    return out;
  }

  /// (Q st U (Q st V A)) to (Q st U,V A).
  Formula merge(const Formula& node) {
    if (!node.is_quantifier() || !node.standard || !node.body().is_standard(node.op)) mismatch("R4-merge", node);
    std::set<std::string> avoid;
    for (const auto& b : node.binders) avoid.insert(b.name);
    auto inner = node.body().binders;
    Formula body = node.body().body();
    freshen(inner, body, avoid, taken_);
    auto binders = node.binders;
    binders.insert(binders.end(), inner.begin(), inner.end());
    return Formula::quantifier(node.op, true, std::move(binders), std::move(body));
  }

  /// (all X (ex st E A)) to (ex st w (all X (ex-in E w A))), A internal.
  Formula idealise(const Formula& node) {
    if (node.op != Op::forall || node.standard || !node.body().is_standard(Op::exists) ||
        !is_internal(node.body().body())) {
      mismatch("R4-idealise", node);
    }
    const Formula& inner = node.body();
    const std::string w = fresh_name("w", taken_);
    taken_.insert(w);
    Formula bounded = Formula::bounded_exists(inner.binders, Term::name(w), inner.body());
    return Formula::quantifier(Op::exists, true, {{w, Type::seq(block_type(inner.binders))}},
                               Formula::quantifier(Op::forall, false, node.binders, std::move(bounded)));
  }

  std::set<std::string> taken_;
};

inline Soundness direction_of(const std::string& rule) {
  return rule == "R3-antecedent-st-drop" ? Soundness::implication : Soundness::equivalence;
}

/// Applies `rule` at `path` of `root`.
inline Formula apply_rule(const Formula& root, const std::string& rule, const Path& path) {
  Formula out = root;
  Formula& target = subformula(out, path);
  target = Rewriter(root).apply(rule, target);
  return out;
}

}  // namespace detail

/// Ordered rewrite steps from input to output.
struct RuleTrace {
  std::vector<RuleStep> steps;

  /// Equivalence unless some step only strengthens.
  Soundness certificate() const {
    for (const auto& s : steps) {
      if (s.direction == Soundness::implication) return Soundness::implication;
    }
    return Soundness::equivalence;
  }

  bool uses(const std::string& prefix) const {
    for (const auto& s : steps) {
      if (s.rule.starts_with(prefix)) return true;
    }
    return false;
  }

  /// Re-applies every step to `input`; throws NotNormalizable when a recorded
  /// before/after subformula disagrees with the replay.
  Formula replay(const Formula& input) const {
    Formula f = input;
    for (const auto& s : steps) {
      if (!(detail::subformula(f, s.path) == s.before)) throw NotNormalizable("replay diverged before " + s.rule);
      f = detail::apply_rule(f, s.rule, s.path);
      if (!(detail::subformula(f, s.path) == s.after)) throw NotNormalizable("replay diverged after " + s.rule);
    }
    return f;
  }
};

/// (all st universal (ex st existential matrix)) under optional free
/// declarations; either block may be empty.
struct NormalForm {
  std::vector<Binder> free;
  std::vector<Binder> universal;
  std::vector<Binder> existential;
  Formula matrix;

  Formula to_formula() const {
    Formula f = matrix;
    if (!existential.empty()) f = Formula::quantifier(Op::exists, true, existential, std::move(f));
    if (!universal.empty()) f = Formula::quantifier(Op::forall, true, universal, std::move(f));
    if (!free.empty()) f = Formula::quantifier(Op::free, false, free, std::move(f));
    return f;
  }

  static NormalForm from_formula(const Formula& f) {
    NormalForm nf;
    const Formula* cur = &f;
    if (cur->op == Op::free) {
      nf.free = cur->binders;
      cur = &cur->body();
    }
    if (cur->is_standard(Op::forall)) {
      nf.universal = cur->binders;
      cur = &cur->body();
    }
    if (cur->is_standard(Op::exists)) {
      nf.existential = cur->binders;
      cur = &cur->body();
    }
    if (!is_internal(*cur)) throw NotNormalizable("no normal form: " + cur->to_string());
    nf.matrix = *cur;
    return nf;
  }
};

struct Normalization {
  NormalForm normal_form;
  RuleTrace trace;
  Formula output;

  Soundness certificate() const { return trace.certificate(); }
};

namespace detail {

/// Drives the rewrite rules bottom-up. Pulls standard quantifiers that end up
/// universal before those that end up existential.
class Normalizer {
 public:
  explicit Normalizer(Formula input) : root_(std::move(input)) {}

  Normalization run() {
    normalize({});
    return {NormalForm::from_formula(root_), std::move(trace_), root_};
  }

 private:
  const Formula& at(const Path& p) const { return subformula(root_, p); }

  void step(const std::string& rule, const Path& p) {
    RuleStep s{rule, p, at(p), {}, direction_of(rule)};
    root_ = apply_rule(root_, rule, p);
    s.after = at(p);
    trace_.steps.push_back(std::move(s));
  }

  void normalize(const Path& p) {
    if (is_internal(at(p))) return;
    const Formula node = at(p);
    switch (node.op) {
      case Op::atom:
      case Op::st:
        throw NotNormalizable("st atom outside quantifier flags: " + node.to_string());
      case Op::free:
        normalize(child(p, 0));
        return;
      case Op::exists_in:
        throw NotNormalizable("standard quantifier under a bounded existential: " + node.to_string());
      case Op::forall:
      case Op::exists:
        normalize(child(p, 0));
        if (!node.standard) lift_through_internal(p);
        if (at(p).is_standard(Op::exists) && at(child(p, 0)).is_standard(Op::forall)) {
          throw NotNormalizable("standard universal under a standard existential: " + node.to_string());
        }
        settle(p);
        return;
      case Op::implication:
        if (!is_internal(node.kids[1])) drop_antecedent_st(child(p, 0));
        normalize(child(p, 0));
        normalize(child(p, 1));
        herbrandize(child(p, 0));
        pull_all(p);
        return;
      case Op::negation:
        normalize(child(p, 0));
        herbrandize(child(p, 0));
        pull_all(p);
        return;
      case Op::conjunction:
      case Op::disjunction:
        for (std::size_t i = 0; i < node.kids.size(); ++i) normalize(child(p, i));
        pull_all(p);
        return;
    }
  }

  /// Antecedent conjuncts (all st U A) with A internal and some variable of
  /// positive type in U lose their st flag.
  void drop_antecedent_st(const Path& p) {
    const Formula& node = at(p);
    if (node.op == Op::conjunction) {
      for (std::size_t i = 0; i < node.kids.size(); ++i) drop_antecedent_st(child(p, i));
      return;
    }
    if (!node.is_standard(Op::forall) || !is_internal(node.body())) return;
    for (const auto& b : node.binders) {
      if (!b.type.is_zero()) {
        step("R3-antecedent-st-drop", p);
        return;
      }
    }
  }

  void herbrandize(const Path& p) {
    const Formula& node = at(p);
    if (node.is_standard(Op::forall) && node.body().is_standard(Op::exists)) step("R2-herbrandize", p);
  }

  /// Moves standard quantifiers above an internal quantifier at p.
  void lift_through_internal(Path p) {
    for (;;) {
      const Formula& node = at(p);
      const Formula& body = node.body();
      if (body.is_standard(node.op)) {
        step("R1-commute", p);
        p = child(p, 0);
      } else if (node.op == Op::forall && body.is_standard(Op::exists)) {
        step("R4-idealise", p);
        return;
      } else if (body.is_quantifier() && body.standard) {
        throw NotNormalizable("standard quantifier under an internal " + std::string(keyword(node.op)) + ": " +
                              node.to_string());
      } else {
        return;
      }
    }
  }

  void pull_all(const Path& p) {
    Path c = p;
    for (;;) {
      const Formula& node = at(c);
      std::optional<std::size_t> pick;
      for (const Op wanted : {Op::forall, Op::exists}) {
        for (std::size_t i = 0; i < node.kids.size() && !pick; ++i) {
          const Formula& kid = node.kids[i];
          if (!kid.is_quantifier() || !kid.standard) continue;
          const bool flip = node.op == Op::negation || (node.op == Op::implication && i == 0);
          if ((flip ? dual(kid.op) : kid.op) == wanted) pick = i;
        }
        if (pick) break;
      }
      if (!pick) break;
      step("R1-pull:" + std::to_string(*pick), c);
      c = child(c, 0);
    }
    settle(p);
  }

  /// Merges adjacent same-kind standard blocks along the prefix at p.
  void settle(Path p) {
    while (at(p).is_quantifier() && at(p).standard) {
      if (at(child(p, 0)).is_standard(at(p).op)) {
        step("R4-merge", p);
      } else {
        p = child(p, 0);
      }
    }
  }

  Formula root_;
  RuleTrace trace_;
};

}  // namespace detail

/// Rewrites F to a normal form, recording each rule application.
inline Normalization to_normal_form(const Formula& f) { return detail::Normalizer(f).run(); }

/// (all U (ex-in E (app t U) matrix)) for a fresh term symbol t.
inline Formula extraction_obligation(const NormalForm& nf) {
  std::set<std::string> taken;
  detail::collect_names(nf.to_formula(), taken);
  const std::string t = detail::fresh_name("t", taken);
  Formula f = nf.matrix;
  if (!nf.existential.empty()) {
    f = Formula::bounded_exists(nf.existential, Term::apply(t, detail::block_terms(nf.universal)), std::move(f));
  }
  if (!nf.universal.empty()) f = Formula::quantifier(Op::forall, false, nf.universal, std::move(f));
  if (!nf.free.empty()) f = Formula::quantifier(Op::free, false, nf.free, std::move(f));
  return f;
}

/// How a single standard witness is read off the finite list t(U).
inline std::string witness_selector(const NormalForm& nf) {
  if (nf.existential.empty()) return "";
  std::string args;
  for (std::size_t i = 0; i < nf.universal.size(); ++i) args += (i ? "," : "") + nf.universal[i].name;
  const std::string list = "t(" + args + ")";
  bool numbers = true;
  for (const auto& b : nf.existential) numbers = numbers && b.type.is_zero();
  std::string names;
  for (std::size_t i = 0; i < nf.existential.size(); ++i) names += (i ? "," : "") + nf.existential[i].name;
  if (numbers) return "s(" + args + ") := max_{i<|" + list + "|} " + list + "(i)  (for " + names + ")";
  return "s(" + args + ") := the first entry of " + list + " satisfying the matrix  (for " + names + ")";
}

}  // namespace mubench
