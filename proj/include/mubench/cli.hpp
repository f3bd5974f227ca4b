#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mubench/corpus.hpp"
#include "mubench/grilliot.hpp"
#include "mubench/normal_form.hpp"
#include "mubench/trees.hpp"

namespace mubench {

/// Ordered `key: value` record of one command-line run.
struct RunReport {
  std::vector<std::pair<std::string, std::string>> fields;

  void add(const std::string& key, std::string value) {
    std::replace(value.begin(), value.end(), '\n', ' ');
    fields.emplace_back(key, std::move(value));
  }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : fields) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : fields) out += k + ": " + v + "\n";
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [k, v] : fields) out[k] = v;
    return out;
  }

  static RunReport parse_text(std::string_view text) {
    RunReport report;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw ParseError("report line without ': ': " + line);
      report.fields.emplace_back(line.substr(0, colon), line.substr(colon + 2));
    }
    return report;
  }

  static RunReport from_json(const nlohmann::ordered_json& j) {
    RunReport report;
    for (const auto& [k, v] : j.items()) report.fields.emplace_back(k, v.get<std::string>());
    return report;
  }

  bool operator==(const RunReport&) const = default;
};

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

struct CliResult {
  int exit_code = kExitOk;
  RunReport report;
  std::string output;  ///< what the binary prints on stdout
};

namespace cli_detail {

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string optional_nat(const std::optional<Nat>& n) { return n ? std::to_string(*n) : "none"; }

inline std::string digits(const BinaryExpansion& x, Nat n) {
  std::string out = "0.";
  for (Nat i = 1; i <= n; ++i) out += std::to_string(x.digit(i));
  return out;
}

inline std::string bits(const TreePath& p, Nat n) {
  std::string out;
  for (Nat i = 0; i < n; ++i) out += std::to_string(p.bit(i));
  return out;
}

inline std::string path_text(const Path& p) {
  std::string out = "/";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "/" : "") + std::to_string(p[i]);
  return out;
}

inline void extraction_fields(RunReport& r, const Extraction& e, const PresentedSequence& f) {
  const auto oracle = mu_exact(f);
  r.add("xi_bound", std::to_string(e.bound));
  r.add("witness", optional_nat(e.witness));
  r.add("oracle", optional_nat(oracle));
  r.add("witness_within_bound", yes_no(!e.witness || *e.witness <= e.bound));
  r.add("verdict", e.witness == oracle && (!e.witness || *e.witness <= e.bound) ? "pass" : "fail");
}

inline RunReport ubin(const PresentedSequence& f) {
  RunReport r;
  r.add("subcommand", "ubin");
  r.add("flag", f.to_string());
  const auto [lo, hi] = counterexample_pair(f);
  const auto phi = ubin_from_mu(mu_exact);
  r.add("x_minus", lo.describe());
  r.add("x_plus", hi.describe());
  const auto dlo = phi(lo), dhi = phi(hi);
  r.add("digits_minus", digits(dlo, 8));
  r.add("digits_plus", digits(dhi, 8));
  r.add("first_digit_disagreement", yes_no(dlo.digit(1) != dhi.digit(1)));
  extraction_fields(r, extract_via_ubin(phi, ubin_xi(phi), f), f);
  return r;
}

inline RunReport wwkl_flag(const PresentedSequence& f) {
  RunReport r;
  r.add("subcommand", "wwkl");
  r.add("flag", f.to_string());
  const auto [t0, t1] = trees_from_flag(f);
  const auto phi = uwwkl_from_mu(mu_exact);
  r.add("tree_0", t0.to_string());
  r.add("tree_1", t1.to_string());
  const auto p0 = phi(t0), p1 = phi(t1);
  r.add("path_0", bits(p0, 8));
  r.add("path_1", bits(p1, 8));
  r.add("first_bit_disagreement", yes_no(p0.bit(0) != p1.bit(0)));
  extraction_fields(r, extract_via_uwwkl(phi, uwwkl_xi(phi), f), f);
  return r;
}

inline RunReport wwkl_tree(const PresentedTree& t) {
  RunReport r;
  r.add("subcommand", "wwkl");
  r.add("tree", t.to_string());
  r.add("measure_witness", optional_nat(t.measure_witness()));
  const auto path = uwwkl_from_mu(mu_exact)(t);
  r.add("path", bits(path, 16));
  r.add("path_presented", path.presented().to_string());
  bool inside = true;
  BitString node;
  for (Nat n = 0; n < 16; ++n) {
    node = node.extended(path.bit(n) != 0);
    inside = inside && t.contains_unobserved(node);
  }
  r.add("path_in_tree", yes_no(inside));
  r.add("verdict", inside ? "pass" : "fail");
  return r;
}

inline RunReport ivt(const PresentedSequence& f) {
  RunReport r;
  r.add("subcommand", "ivt");
  r.add("flag", f.to_string());
  const auto plus = ivt_counterexample(f, +1), minus = ivt_counterexample(f, -1);
  const auto phi = uivt_from_mu(mu_exact);
  r.add("f_plus", plus.label());
  r.add("f_minus", minus.label());
  r.add("root_plus", to_string(phi(plus).approx(kRootPrecision)));
  r.add("root_minus", to_string(phi(minus).approx(kRootPrecision)));
  r.add("root_precision", std::to_string(kRootPrecision));
  extraction_fields(r, extract_via_uivt(phi, uivt_xi(phi), f), f);
  return r;
}

inline RunReport dq(const PresentedSequence& f) {
  RunReport r;
  r.add("subcommand", "dq");
  r.add("flag", f.to_string());
  const auto x = dq_real(f);
  r.add("real", x.describe());
  const auto phi = udq_from_mu(mu_exact);
  const auto answer = phi(x);
  if (const auto* w = std::get_if<RationalWitness>(&answer)) {
    r.add("answer", "rational " + to_string(w->value));
    r.add("certificate", to_string(w->certificate));
  } else {
    r.add("answer", "irrational");
  }
  const auto e = extract_via_udq(phi, f);
  const auto oracle = mu_exact(zero_indicator(f));
  r.add("first_nonzero", optional_nat(e.witness));
  r.add("oracle", optional_nat(oracle));
  r.add("verdict", e.witness == oracle ? "pass" : "fail");
  return r;
}

inline RunReport weier(const PresentedSequence& f) {
  RunReport r;
  r.add("subcommand", "weier");
  r.add("flag", f.to_string());
  const auto [plus, minus] = weierstrass_counterexample(f);
  r.add("f_plus", plus.label());
  r.add("f_minus", minus.label());
  const auto a = argmax(plus), b = argmax(minus);
  r.add("argmax_plus", to_string(a));
  r.add("argmax_minus", to_string(b));
  const bool differ = a != b;
  const bool event = mu_exact(f).has_value();
  r.add("argmax_disagreement", yes_no(differ));
  r.add("oracle_event", yes_no(event));
  r.add("verdict", differ == event ? "pass" : "fail");
  return r;
}

inline RunReport fan(const std::string& functional, const std::optional<std::string>& tree) {
  RunReport r;
  r.add("subcommand", "fan");
  const auto g = parse_functional(functional);
  r.add("functional", g.name());
  r.add("omega", std::to_string(omega_fan(g)));
  if (!tree) {
    const auto theta = theta_special(g);
    r.add("theta_bound", std::to_string(theta.bound));
    r.add("cover_size", std::to_string(theta.cover.size()));
    r.add("verdict", "pass");
    return r;
  }
  const auto t = PresentedTree::parse(*tree);
  r.add("tree", t.to_string());
  const auto scf = scf_check(g, t);
  r.add("theta_bound", std::to_string(scf.bound));
  r.add("cover_size", std::to_string(scf.cover_size));
  r.add("antecedent", yes_no(scf.antecedent));
  r.add("consequent", yes_no(scf.consequent));
  r.add("implication", yes_no(scf.implication));
  r.add("verdict", scf.implication ? "pass" : "fail");
  return r;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline RunReport normalize(const std::string& file) {
  RunReport r;
  r.add("subcommand", "normalize");
  r.add("formula_file", file);
  const auto input = parse_formula(read_file(file));
  r.add("input", input.to_string());
  const auto result = to_normal_form(input);
  r.add("normal_form", result.output.to_string());
  r.add("universal", detail::binder_block(result.normal_form.universal));
  r.add("existential", detail::binder_block(result.normal_form.existential));
  r.add("matrix", result.normal_form.matrix.to_string());
  r.add("steps", std::to_string(result.trace.steps.size()));
  for (std::size_t i = 0; i < result.trace.steps.size(); ++i) {
    const auto& s = result.trace.steps[i];
    r.add("step." + std::to_string(i), s.rule + " at " + path_text(s.path) + " [" + to_string(s.direction) +
                                           "]: " + s.before.to_string() + " => " + s.after.to_string());
  }
  r.add("certificate", to_string(result.certificate()));
  r.add("obligation", extraction_obligation(result.normal_form).to_string());
  r.add("witness_selector", witness_selector(result.normal_form));
  const bool replays = result.trace.replay(input) == result.output;
  r.add("trace_replays", yes_no(replays));
  r.add("verdict", replays && is_internal(result.normal_form.matrix) ? "pass" : "fail");
  return r;
}

/// Every round trip on one sequence: recovered first zeros equal the scan
/// and witnesses stay within their bounds.
inline bool round_trips(const PresentedSequence& f) {
  const auto oracle = mu_exact(f);
  const auto ok = [&](const Extraction& e) { return e.witness == oracle && (!e.witness || *e.witness <= e.bound); };
  const auto ubin_phi = ubin_from_mu(mu_exact);
  const auto wwkl_phi = uwwkl_from_mu(mu_exact);
  const auto ivt_phi = uivt_from_mu(mu_exact);
  return ok(extract_via_ubin(ubin_phi, ubin_xi(ubin_phi), f)) &&
         ok(extract_via_uwwkl(wwkl_phi, uwwkl_xi(wwkl_phi), f)) &&
         ok(extract_via_uivt(ivt_phi, uivt_xi(ivt_phi), f)) &&
         mu_from_udq(udq_from_mu(mu_exact))(zero_indicator(f)) == oracle;
}

inline RunReport corpus(std::uint64_t seed, std::size_t count, bool check, const std::optional<std::string>& out) {
  RunReport r;
  r.add("subcommand", "corpus");
  r.add("seed", std::to_string(seed));
  r.add("count", std::to_string(count));
  auto items = extraction_corpus(seed, count);
  items.resize(count);
  std::ofstream file;
  if (out) {
    file.open(*out);
    if (!file) throw ParseError("cannot write '" + *out + "'");
    r.add("written_to", *out);
  }
  std::size_t failures = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (file.is_open()) file << items[i].to_string() << "\n";
    r.add("sequence." + std::to_string(i), items[i].to_string());
    if (check && !round_trips(items[i])) {
      ++failures;
      r.add("failure." + std::to_string(i), items[i].to_string());
    }
  }
  if (check) r.add("round_trip_failures", std::to_string(failures));
  r.add("verdict", failures == 0 ? "pass" : "fail");
  return r;
}

}  // namespace cli_detail

/// Runs one batch command. `args` excludes the program name.
inline CliResult run(const std::vector<std::string>& args) {
  CLI::App app{"Executable companions to Grilliot-style extractions over presented objects", "mubench"};
  app.require_subcommand(1);
  bool json = false;
  std::string flag, tree, functional, formula;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::size_t count = 120;
  bool check = false;

  const auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", json, "print the report as JSON"); };
  auto* ubin = app.add_subcommand("ubin", "binary expansion extraction on a flag sequence");
  auto* wwkl = app.add_subcommand("wwkl", "tree path extraction on a flag sequence, or a path through --tree");
  auto* ivt = app.add_subcommand("ivt", "root-finding extraction on a flag sequence");
  auto* dq = app.add_subcommand("dq", "rational dichotomy on a flag sequence");
  auto* weier = app.add_subcommand("weier", "maximum location on a flag sequence");
  auto* fan = app.add_subcommand("fan", "fan modulus and special-fan check of a catalog functional");
  auto* normalize = app.add_subcommand("normalize", "normal form, trace and extraction obligation of a formula file");
  auto* corpus = app.add_subcommand("corpus", "seeded corpus of flag sequences");
  for (auto* sub : {ubin, ivt, dq, weier}) sub->add_option("--flag", flag, "presented sequence")->required();
  auto* wwkl_flag = wwkl->add_option("--flag", flag, "presented sequence");
  auto* wwkl_tree = wwkl->add_option("--tree", tree, "presented tree");
  wwkl_flag->excludes(wwkl_tree);
  fan->add_option("--functional", functional, "catalog functional")->required();
  auto* fan_tree = fan->add_option("--tree", tree, "presented tree");
  normalize->add_option("--formula", formula, "S-expression file")->required();
  corpus->add_option("--seed", seed, "random seed")->capture_default_str();
  corpus->add_option("--count", count, "number of sequences")->capture_default_str();
  corpus->add_flag("--check", check, "run every round trip on each sequence");
  corpus->add_option("--out", out, "write line-delimited sequences to this file");
  for (auto* sub : {ubin, wwkl, ivt, dq, weier, fan, normalize, corpus}) add_json(sub);

  CliResult result;
  const auto fail = [&](int code, const std::string& message) {
    result.exit_code = code;
    result.report.add("error", message);
    result.report.add("verdict", "fail");
  };
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (ubin->parsed()) result.report = cli_detail::ubin(PresentedSequence::parse(flag));
    if (wwkl->parsed()) {
      if (wwkl_tree->count()) {
        result.report = cli_detail::wwkl_tree(PresentedTree::parse(tree));
      } else if (wwkl_flag->count()) {
        result.report = cli_detail::wwkl_flag(PresentedSequence::parse(flag));
      } else {
        throw ParseError("wwkl needs --flag or --tree");
      }
    }
    if (ivt->parsed()) result.report = cli_detail::ivt(PresentedSequence::parse(flag));
    if (dq->parsed()) result.report = cli_detail::dq(PresentedSequence::parse(flag));
    if (weier->parsed()) result.report = cli_detail::weier(PresentedSequence::parse(flag));
    if (fan->parsed()) {
      result.report = cli_detail::fan(functional, fan_tree->count() ? std::optional(tree) : std::nullopt);
    }
    if (normalize->parsed()) result.report = cli_detail::normalize(formula);
    if (corpus->parsed()) result.report = cli_detail::corpus(seed, count, check, out);
    if (result.report.get("verdict") != "pass") result.exit_code = kExitViolation;
  } catch (const CLI::CallForHelp&) {
    result.output = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.output = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    fail(kExitInputError, std::string("usage: ") + e.what());
  } catch (const BoundViolation& e) {
    fail(kExitViolation, e.what());
  } catch (const MalformedWitness& e) {
    fail(kExitViolation, e.what());
  } catch (const Error& e) {
    fail(kExitInputError, e.what());
  }
  result.output = json ? result.report.to_json().dump(2) + "\n" : result.report.to_text();
  return result;
}

}  // namespace mubench
