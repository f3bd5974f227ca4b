#include <gtest/gtest.h>

#include <filesystem>

#include "mubench/cli.hpp"
#include "support.hpp"

using namespace mubench;

namespace {

std::string fixture_path(const std::string& name) { return std::string(MUBENCH_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST(Cli, UbinReportsDisagreementAndWitness) {
  const auto r = run({"ubin", "--flag", "prefix=[1,1,0];tail=[1]"});
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.get("first_digit_disagreement"), "yes");
  EXPECT_EQ(r.report.get("witness"), "2");
  EXPECT_EQ(r.report.get("oracle"), "2");
  EXPECT_NE(r.report.get("x_minus")->find("1/2 -"), std::string::npos);
}

TEST(Cli, FanOnFullTree) {
  const auto r = run({"fan", "--functional", "f0+f1+1", "--tree", "full"});
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.get("omega"), "2");
  EXPECT_EQ(r.report.get("theta_bound"), "3");
  EXPECT_EQ(r.report.get("antecedent"), "no");
  EXPECT_EQ(r.report.get("implication"), "yes");
}

TEST(Cli, NormalizeTransferFixture) {
  const auto r = run({"normalize", "--formula", fixture_path("pi01_transfer.sexp")});
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.get("certificate"), "equivalence");
  EXPECT_TRUE(alpha_equal(parse_formula(*r.report.get("normal_form")),
                          parse_formula(testing_support::read_fixture("pi01_transfer.normal.sexp"))));
  EXPECT_EQ(run({"normalize", "--formula", fixture_path("expansion_implies_transfer.sexp")}).report.get("certificate"),
            "implication");
}

TEST(Cli, EverySubcommandSucceedsOnValidInput) {
  const std::vector<std::vector<std::string>> commands{
      {"wwkl", "--flag", "prefix=[1,0];tail=[1]"},
      {"wwkl", "--tree", "path:110+full@2"},
      {"ivt", "--flag", "prefix=[1,1,1,0];tail=[1]"},
      {"ivt", "--flag", "prefix=[];tail=[1]"},
      {"dq", "--flag", "prefix=[0,0,3];tail=[1]"},
      {"weier", "--flag", "prefix=[1,0];tail=[1]"},
      {"weier", "--flag", "prefix=[];tail=[2]"},
      {"fan", "--functional", "search:4"},
      {"corpus", "--seed", "4", "--count", "30", "--check"},
  };
  for (const auto& args : commands) {
    const auto r = run(args);
    EXPECT_EQ(r.exit_code, kExitOk) << args[0] << "\n" << r.output;
    EXPECT_EQ(r.report.get("verdict"), "pass") << args[0];
  }
}

TEST(Cli, InputErrorsExitWithTwo) {
  const std::vector<std::vector<std::string>> commands{
      {},
      {"bogus"},
      {"ubin"},
      {"ubin", "--flag", "garbage"},
      {"fan", "--functional", "nope"},
      {"wwkl"},
      {"wwkl", "--tree", "path:1"},
      {"normalize", "--formula", "/nonexistent/formula.sexp"},
  };
  for (const auto& args : commands) {
    const auto r = run(args);
    EXPECT_EQ(r.exit_code, kExitInputError) << (args.empty() ? "(none)" : args[0]) << "\n" << r.output;
    EXPECT_TRUE(r.report.get("error").has_value());
  }
}

TEST(Cli, ReportsRoundTripThroughTextAndJson) {
  const std::vector<std::vector<std::string>> commands{
      {"ubin", "--flag", "prefix=[1,1,0];tail=[1]"},
      {"fan", "--functional", "f0+f1+1", "--tree", "full"},
      {"normalize", "--formula", fixture_path("special_fan.sexp")},
      {"bogus"},
  };
  for (auto args : commands) {
    const auto text = run(args);
    EXPECT_EQ(RunReport::parse_text(text.output), text.report);
    args.push_back("--json");
    const auto json = run(args);
    if (args[0] == "bogus") continue;
    const auto parsed = RunReport::from_json(nlohmann::ordered_json::parse(json.output));
    EXPECT_EQ(parsed, text.report) << args[0];
    for (const auto& [key, value] : text.report.fields) EXPECT_EQ(parsed.get(key), value);
  }
}

TEST(Cli, CorpusIsSeededAndWritesLines) {
  const auto a = run({"corpus", "--count", "40"});
  const auto b = run({"corpus", "--count", "40", "--seed", "0"});
  const auto c = run({"corpus", "--count", "40", "--seed", "1"});
  EXPECT_EQ(a.report, b.report);
  EXPECT_NE(a.report, c.report);
  EXPECT_EQ(a.report.get("sequence.39").has_value(), true);
  EXPECT_EQ(a.report.get("sequence.40").has_value(), false);

  const auto file = std::filesystem::temp_directory_path() / "mubench_corpus_test.txt";
  const auto w = run({"corpus", "--count", "12", "--out", file.string()});
  ASSERT_EQ(w.exit_code, kExitOk);
  std::ifstream in(file);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(PresentedSequence::parse(line).to_string(), line);
    ++lines;
  }
  EXPECT_EQ(lines, 12u);
  std::filesystem::remove(file);
}
