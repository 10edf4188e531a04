#include <gtest/gtest.h>

#include <sys/wait.h>

#include <sstream>

#include "botsim/cli.hpp"

using namespace botsim;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "botsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("botsim_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string p(const std::string& name) const { return (dir / name).string(); }
  static std::string data(const std::string& name) { return std::string(BOTSIM_DATA_DIR) + "/" + name; }

  void parse_and_goals(int per_query = 2) {
    ASSERT_EQ(cli({"parse", "--bot", data("template_bot.json"), "--out", p("parsed"), "--approve-all"}).code, 0);
    ASSERT_EQ(cli({"goals", "--bot", data("template_bot.json"), "--maps", p("parsed"), "--out", p("goals.json"),
                   "--seed", "3", "--per-query", std::to_string(per_query)})
                  .code,
              0);
  }

  fs::path dir;
};

}  // namespace

TEST_F(CliTest, ParseWritesArtifacts) {
  const auto r = cli({"parse", "--bot", data("template_bot.json"), "--out", p("parsed")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = Json::parse(r.out);
  EXPECT_EQ(summary.at("dialogs"), 6);
  EXPECT_EQ(summary.at("pending_reviews").size(), 12u);
  for (const auto* f : {"maps.json", "graph.json", "definition.json"}) EXPECT_TRUE(fs::exists(dir / "parsed" / f)) << f;

  const auto approved = cli({"parse", "--bot", data("template_bot.json"), "--out", p("ok"), "--approve-all"});
  EXPECT_TRUE(Json::parse(approved.out).at("pending_reviews").empty());

  const auto csv = cli({"parse", "--bot", data("three_dialog_flow.csv"), "--adaptor", "csv-flow", "--out", p("csv")});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(Json::parse(csv.out).at("dialogs"), 3);
}

TEST_F(CliTest, SimulateIsReproducible) {
  parse_and_goals();
  const std::vector<std::string> base = {"simulate", "--bot", data("template_bot.json"), "--maps", p("parsed"),
                                         "--goals", p("goals.json"), "--seed", "7", "--faults",
                                         data("faults_ci_to_co.json")};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", p("a.jsonl")});
  b.insert(b.end(), {"--out", p("b.jsonl"), "--parallelism", "4"});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(read_file(p("a.jsonl")), read_file(p("b.jsonl")));
  EXPECT_EQ(episodes_from_jsonl(p("a.jsonl")).size(), 120u);
}

TEST_F(CliTest, FullPipeline) {
  parse_and_goals(5);
  const auto sim = cli({"simulate", "--bot", data("template_bot.json"), "--maps", p("parsed"), "--goals",
                        p("goals.json"), "--out", p("t.jsonl"), "--seed", "1"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_DOUBLE_EQ(Json::parse(sim.out).at("success_rate").get<double>(), 1.0);

  const auto rep = cli({"report", "--bot", data("template_bot.json"), "--transcripts", p("t.jsonl"), "--out",
                        p("report.json"), "--n-resamples", "100", "--generated-at", "2024-05-01T00:00:00Z"});
  ASSERT_EQ(rep.code, 0) << rep.err;
  const auto report = read_json_file(p("report.json"));
  EXPECT_EQ(report.at("bot_id"), "Template Bot");
  EXPECT_EQ(report.at("generated_at"), "2024-05-01T00:00:00Z");
  EXPECT_DOUBLE_EQ(report.at("goal_success_rate").get<double>(), 1.0);

  const auto sug = cli({"suggest", "--bot", data("template_bot.json"), "--transcripts", p("t.jsonl"), "--out",
                        p("s.json")});
  ASSERT_EQ(sug.code, 0) << sug.err;
  EXPECT_EQ(read_json_file(p("s.json")), Json::array());

  const auto exp = cli({"export-augmented", "--bot", data("template_bot.json"), "--suggestions", p("s.json"),
                        "--accept-all", "--out", p("aug.json")});
  ASSERT_EQ(exp.code, 0) << exp.err;

  const auto paths = cli({"paths", "--bot", data("template_bot.json"), "--src", "Report_an_Issue", "--dst", "End_Chat"});
  ASSERT_EQ(paths.code, 0) << paths.err;
  EXPECT_NE(paths.out.find("Report_an_Issue"), std::string::npos);
}

TEST_F(CliTest, FaultsFlowIntoSuggestions) {
  parse_and_goals(10);
  ASSERT_EQ(cli({"simulate", "--bot", data("template_bot.json"), "--maps", p("parsed"), "--goals", p("goals.json"),
                 "--out", p("t.jsonl"), "--faults", data("faults_ci_to_co.json")})
                .code,
            0);
  const auto sug = cli({"suggest", "--bot", data("template_bot.json"), "--transcripts", p("t.jsonl"), "--out",
                        p("s.json"), "--errors-out", p("e.json")});
  ASSERT_EQ(sug.code, 0) << sug.err;
  EXPECT_FALSE(read_json_file(p("e.json")).empty());
  const auto suggestions = read_json_file(p("s.json"));
  ASSERT_FALSE(suggestions.empty());
  const auto exp = cli({"export-augmented", "--bot", data("template_bot.json"), "--suggestions", p("s.json"),
                        "--accept", suggestions.at(0).at("id").get<std::string>(), "--out", p("aug.json")});
  EXPECT_EQ(exp.code, 0) << exp.err;
  EXPECT_EQ(cli({"export-augmented", "--bot", data("template_bot.json"), "--suggestions", p("s.json"), "--accept",
                 "sg-nope"})
                .code,
            1);
}

TEST_F(CliTest, ErrorsAndExitCodes) {
  const auto missing = cli({"parse", "--bot", p("nope.json"), "--out", p("x")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_EQ(missing.err.rfind("error[", 0), 0u) << missing.err;

  write_file_atomic(p("bad.json"), "{\"bot_name\": \"x\", \"dialogs\": []}");
  const auto invalid = cli({"parse", "--bot", p("bad.json"), "--out", p("x")});
  EXPECT_EQ(invalid.code, 1);

  ASSERT_EQ(cli({"parse", "--bot", data("template_bot.json"), "--out", p("parsed")}).code, 0);
  const auto gated = cli({"goals", "--bot", data("template_bot.json"), "--maps", p("parsed"), "--out", p("g.json")});
  EXPECT_EQ(gated.code, 1);
  EXPECT_NE(gated.err.find("error[ContractError]"), std::string::npos) << gated.err;

  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"paths", "--bot", data("template_bot.json"), "--src", "Nowhere", "--dst", "End_Chat"}).code, 1);
  EXPECT_EQ(exit_code_for("ConnectorError"), 2);
  EXPECT_EQ(exit_code_for("SchemaError"), 1);
}

TEST_F(CliTest, BinaryMatchesInProcess) {
  const std::string cmd = std::string(BOTSIM_CLI) + " parse --bot " + data("template_bot.json") + " --out " +
                          p("bin") + " > " + p("stdout.txt") + " 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  const auto in_process = cli({"parse", "--bot", data("template_bot.json"), "--out", p("inproc")});
  EXPECT_EQ(read_file(p("stdout.txt")), in_process.out);
  EXPECT_EQ(read_file(dir / "bin" / "maps.json"), read_file(dir / "inproc" / "maps.json"));

  const int bad = std::system((std::string(BOTSIM_CLI) + " parse --bot " + p("nope.json") + " --out " + p("x") + " 2>/dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}
