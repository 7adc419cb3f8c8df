#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "surpmark/io.hpp"
#include "surpmark/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("surpmark_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Invocation run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + SURPMARK_CLI_PATH + "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Invocation r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  // Two labelled corpora from the synthetic chains, reference and test halves.
  void make_corpora() const {
    const std::string fixtures = SURPMARK_FIXTURE_DIR;
    write("machine_spec.json", R"({"matrix": [[0.6,0.3,0.1],[0.5,0.3,0.2],[0.7,0.2,0.1]],
      "emission": {"mean": [1,3,5], "stddev": [1,1,1]}})");
    write("human_spec.json", R"({"matrix": [[0.4,0.4,0.2],[0.3,0.4,0.3],[0.3,0.3,0.4]],
      "emission": {"mean": [1,3,5], "stddev": [1,1,1]}})");
    for (const auto& [side, seed] : {std::pair{"machine", 1}, std::pair{"human", 2}}) {
      const std::string s = side;
      ASSERT_EQ(run("gen-synthetic --config " + path(s + "_spec.json") +
                    " --count 40 --length 300 --seed " + std::to_string(seed) + " --label " + s +
                    " --id-prefix " + s + "-ref --out " + path(s + "_ref.jsonl"))
                    .status,
                0);
      ASSERT_EQ(run("gen-synthetic --config " + path(s + "_spec.json") +
                    " --count 20 --length 300 --seed " + std::to_string(seed + 100) + " --label " + s +
                    " --id-prefix " + s + "-test --out " + path(s + "_test.jsonl"))
                    .status,
                0);
    }
    std::ofstream(dir_ / "test.jsonl") << slurp(dir_ / "human_test.jsonl") << slurp(dir_ / "machine_test.jsonl");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, BuildScoreEvalPipeline) {
  make_corpora();
  const Invocation build = run("build-ref --human " + path("human_ref.jsonl") + " --machine " +
                        path("machine_ref.jsonl") + " --out " + path("pack.json") + " --k 4");
  ASSERT_EQ(build.status, 0) << build.err;

  const Invocation info = run("pack-info " + path("pack.json"));
  ASSERT_EQ(info.status, 0) << info.err;
  const json summary = json::parse(info.out);
  EXPECT_EQ(summary["k"], 4);
  EXPECT_EQ(summary["n_machine"], 40 * 299);
  EXPECT_EQ(summary["metadata"]["human_source"], "human_ref.jsonl");

  const Invocation score = run("score --pack " + path("pack.json") + " --in " + path("test.jsonl") + " --tau 0");
  ASSERT_EQ(score.status, 0) << score.err;
  std::istringstream lines(score.out);
  std::string line;
  int correct = 0, total = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    const std::string id = j["id"];
    const std::string expected = id.rfind("human", 0) == 0 ? "human" : "machine";
    correct += j["verdict"] == expected;
    ++total;
  }
  EXPECT_EQ(total, 40);
  EXPECT_GE(correct, 36);

  const Invocation eval = run("eval --pack " + path("pack.json") + " --in " + path("test.jsonl"));
  ASSERT_EQ(eval.status, 0) << eval.err;
  const json report = json::parse(eval.out);
  EXPECT_GT(report["auroc"].get<double>(), 0.95);
  EXPECT_EQ(report["n_positive"], 20);
  EXPECT_EQ(report["skipped"]["failed"], 0);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").status, 0);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("score --in /dev/null").status, 2);
  EXPECT_EQ(run("pack-info /nonexistent/pack.json").status, 2);

  write("pack.json", "{\"format_version\": 2}");
  const Invocation version = run("pack-info " + path("pack.json"));
  EXPECT_EQ(version.status, 1);
  EXPECT_NE(version.err.find("VersionMismatch"), std::string::npos);

  write("broken.json", "{oops");
  EXPECT_EQ(run("pack-info " + path("broken.json")).status, 1);

  make_corpora();
  EXPECT_EQ(run("build-ref --human " + path("human_ref.jsonl") + " --machine " +
                path("machine_ref.jsonl") + " --out " + path("pack.json"))
                .status,
            0);
  const Invocation mode = run("score --pack " + path("pack.json") + " --in " + path("test.jsonl") +
                       " --mode bogus");
  EXPECT_EQ(mode.status, 2);
  EXPECT_NE(mode.err.find("--mode"), std::string::npos);
}

TEST_F(Cli, GenSyntheticIsSeedDeterministic) {
  write("spec.json", R"({"matrix": [[0.5,0.5],[0.2,0.8]], "emission": {"mean": [0,2], "stddev": [1,1]}})");
  const Invocation a = run("gen-synthetic --config " + path("spec.json") + " --count 3 --length 10 --seed 4");
  const Invocation b = run("gen-synthetic --config " + path("spec.json") + " --count 3 --length 10 --seed 4");
  const Invocation c = run("gen-synthetic --config " + path("spec.json") + " --count 3 --length 10 --seed 5");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  std::istringstream in(a.out);
  EXPECT_EQ(surpmark::read_surprisal_jsonl(in).size(), 3u);
}

TEST_F(Cli, SimulateTheoryMatchesLibrary) {
  std::ifstream fixture(std::string(SURPMARK_FIXTURE_DIR) + "/theory.json");
  json doc = json::parse(fixture);
  doc["N"] = 2000;
  doc["n"] = 200;
  doc["trials"] = 60;
  write("theory.json", doc.dump());
  const Invocation r = run("simulate-theory --config " + path("theory.json") + " --seed 17");
  ASSERT_EQ(r.status, 0) << r.err;
  doc["seed"] = 17;
  EXPECT_EQ(json::parse(r.out), surpmark::simulate_theory(surpmark::theory_config_from_json(doc)));
}

TEST_F(Cli, NgramSurprisals) {
  write("train.txt", "a b c a b c\nc b a\n");
  write("docs.txt", "a b c\nq\n");
  const Invocation r = run("ngram-surprisals --train " + path("train.txt") + " --in " + path("docs.txt") +
                    " --label human --id-prefix doc");
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  const auto records = surpmark::read_surprisal_jsonl(in);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].id, "doc-0");
  EXPECT_EQ(records[0].surprisals.size(), 2u);
  EXPECT_NE(r.err.find("doc-1"), std::string::npos);
}

TEST_F(Cli, SweepWritesOutputs) {
  std::ifstream fixture(std::string(SURPMARK_FIXTURE_DIR) + "/sweep.json");
  json doc = json::parse(fixture);
  doc["n_values"] = {500};
  doc["k_values"] = {2, 4};
  doc["trials"] = 3;
  doc["calibration_samples"] = 1000;
  write("sweep.json", doc.dump());
  const Invocation r = run("sweep --config " + path("sweep.json") + " --out " + path("sweep_out"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "sweep_out" / "sweep.csv"), r.out);
  const json summary = json::parse(slurp(dir_ / "sweep_out" / "sweep_summary.json"));
  EXPECT_EQ(summary["rows"].size(), 2u);
}
