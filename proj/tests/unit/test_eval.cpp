#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "surpmark/eval.hpp"
#include "surpmark/io.hpp"
#include "surpmark/rng.hpp"
#include "test_util.hpp"

using namespace surpmark;
using nlohmann::json;

namespace {

double brute_force_auroc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

json load_fixture(const std::string& name) {
  std::ifstream in(std::string(SURPMARK_FIXTURE_DIR) + "/" + name);
  return json::parse(in);
}

// The detection fixture shrunk to a few seconds of work.
json small_experiment() {
  json doc = load_fixture("detection.json");
  doc["n_ref_samples"] = {10, 100};
  doc["n_test"] = 40;
  doc["k_values"] = {4};
  return doc;
}

}  // namespace

TEST(Auroc, HandCases) {
  EXPECT_DOUBLE_EQ(auroc({3, 4}, {1, 2}).auroc, 1.0);
  EXPECT_DOUBLE_EQ(auroc({1, 2}, {3, 4}).auroc, 0.0);
  EXPECT_DOUBLE_EQ(auroc({1, 1}, {1, 1}).auroc, 0.5);
  EXPECT_DOUBLE_EQ(auroc({2, 3}, {1, 2}).auroc, 0.875);
  const EvalResult r = auroc({5, 6, 7}, {1});
  EXPECT_EQ(r.n_positive, 3u);
  EXPECT_EQ(r.n_negative, 1u);
  EXPECT_DOUBLE_EQ(r.human.median, 6.0);
}

TEST(Auroc, MatchesPairwiseCount) {
  Xoshiro256 rng(1);
  std::vector<double> pos(200), neg(200);
  for (auto& x : pos) x = std::round(10.0 * (rng.normal() + 0.5)) / 10.0;
  for (auto& x : neg) x = std::round(10.0 * rng.normal()) / 10.0;
  const double a = auroc(pos, neg).auroc;
  EXPECT_NEAR(a, brute_force_auroc(pos, neg), 1e-12);
  EXPECT_NEAR(auroc(neg, pos).auroc, 1.0 - a, 1e-12);
  std::vector<double> pos_t(pos), neg_t(neg);
  for (auto& x : pos_t) x = std::exp(3.0 * x) - 7.0;
  for (auto& x : neg_t) x = std::exp(3.0 * x) - 7.0;
  EXPECT_NEAR(auroc(pos_t, neg_t).auroc, a, 1e-12);
}

TEST(Auroc, Errors) {
  EXPECT_ERRC(auroc({}, {1.0}), Errc::EmptyClass, "human");
  EXPECT_ERRC(auroc({1.0}, {}), Errc::EmptyClass, "machine");
  EXPECT_ERRC(auroc({1.0, NAN}, {1.0}), Errc::NonFiniteValue);
  EXPECT_EQ(to_json(auroc({1}, {0}))["positive_class"], "human");
}

TEST(ScoreSummary, Quantiles) {
  const ScoreSummary s = summarize_scores({4, 1, 3, 2, 5});
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.q25, 2.0);
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.q75, 4.0);
  EXPECT_DOUBLE_EQ(s.max, 5.0);
  EXPECT_NEAR(s.stddev, std::sqrt(2.5), 1e-15);
  EXPECT_DOUBLE_EQ(summarize_scores({1, 2}).q25, 1.25);
  EXPECT_ERRC(summarize_scores({}), Errc::EmptyInput);
}

TEST(BestThreshold, SeparatesCleanClasses) {
  const ThresholdChoice t = best_threshold({2.0, 3.0, 4.0}, {-1.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(t.balanced_accuracy, 1.0);
  EXPECT_GE(t.tau, 1.0);
  EXPECT_LT(t.tau, 2.0);
  const ThresholdChoice mixed = best_threshold({1.0, 3.0}, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(mixed.balanced_accuracy, 0.75);
}

TEST(Experiment, DeterministicAcrossRunsAndThreads) {
  json doc = small_experiment();
  doc["threads"] = 1;
  const ExperimentConfig one = experiment_config_from_json(doc);
  doc["threads"] = 3;
  const ExperimentConfig three = experiment_config_from_json(doc);
  const std::string a = experiment_csv(one, run_experiment(one));
  EXPECT_EQ(a, experiment_csv(one, run_experiment(one)));
  EXPECT_EQ(a, experiment_csv(three, run_experiment(three)));
  EXPECT_EQ(a.substr(0, a.find('\n')), "k,n_ref_samples,test_length,auroc");
  doc["seed"] = 12;
  const ExperimentConfig other = experiment_config_from_json(doc);
  EXPECT_NE(a, experiment_csv(other, run_experiment(other)));
}

TEST(Experiment, LargerReferencesDoNotHurt) {
  const ExperimentConfig config = experiment_config_from_json(small_experiment());
  const ExperimentResult r = run_experiment(config);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].n_ref_samples, 10u);
  EXPECT_GE(r.rows[1].eval.auroc, r.rows[0].eval.auroc);
  EXPECT_GT(r.rows[1].eval.auroc, 0.9);
  EXPECT_EQ(r.failed_documents, 0u);
  EXPECT_EQ(r.rows[0].eval.n_positive, 40u);
}

TEST(Experiment, RuntimeColumnOnlyOnRequest) {
  json doc = small_experiment();
  doc["n_ref_samples"] = {10};
  doc["record_runtime"] = true;
  const ExperimentConfig config = experiment_config_from_json(doc);
  const ExperimentResult r = run_experiment(config);
  const std::string csv = experiment_csv(config, r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,n_ref_samples,test_length,auroc,runtime_ms");
  EXPECT_GE(r.rows[0].runtime_ms, 0.0);
}

TEST(Experiment, WritesResultsAndManifest) {
  const ExperimentConfig config = experiment_config_from_json(small_experiment());
  const auto dir = std::filesystem::temp_directory_path() / "surpmark_eval_out";
  std::filesystem::remove_all(dir);
  const ExperimentResult r = run_experiment(config, dir);
  std::ifstream csv(dir / "results.csv");
  std::stringstream text;
  text << csv.rdbuf();
  EXPECT_EQ(text.str(), experiment_csv(config, r));
  std::ifstream manifest_in(dir / "manifest.json");
  const json manifest = json::parse(manifest_in);
  EXPECT_EQ(manifest["seed"], 11);
  EXPECT_EQ(manifest["rows"].size(), 2u);
  EXPECT_EQ(manifest["config"], small_experiment());
  std::filesystem::remove_all(dir);
}

TEST(Experiment, ConfigErrorsNameTheField) {
  const auto fails_on = [](json doc, const std::string& field) {
    return ::surpmark::testing::throws_errc([&] { experiment_config_from_json(doc); }, Errc::Config,
                                            field);
  };
  json doc = small_experiment();
  doc.erase("seed");
  EXPECT_TRUE(fails_on(doc, "seed"));
  doc = small_experiment();
  doc["source"]["type"] = "csv";
  EXPECT_TRUE(fails_on(doc, "source.type"));
  doc = small_experiment();
  doc["n_ref_samples"] = json::array();
  EXPECT_TRUE(fails_on(doc, "n_ref_samples"));
  doc = small_experiment();
  doc["mode"] = "fast";
  EXPECT_TRUE(fails_on(doc, "mode"));
  doc = small_experiment();
  doc["alpha"] = 3;
  EXPECT_TRUE(fails_on(doc, "alpha"));
  doc = small_experiment();
  doc["k_values"] = {0};
  EXPECT_TRUE(fails_on(doc, "k_values"));
  doc = small_experiment();
  doc["source"]["human"]["matrix"] = {{1.0, 0.5}};
  EXPECT_TRUE(fails_on(doc, "source.human"));
  doc = small_experiment();
  doc["record_runtime"] = "yes";
  EXPECT_TRUE(fails_on(doc, "record_runtime"));
}

TEST(Experiment, JsonlSource) {
  const auto dir = std::filesystem::temp_directory_path() / "surpmark_eval_jsonl";
  std::filesystem::create_directories(dir);
  const auto write_side = [&](const std::string& name, double mean, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<SurprisalRecord> docs;
    for (int i = 0; i < 60; ++i) {
      SurprisalRecord r{name + std::to_string(i), std::nullopt, std::vector<double>(150)};
      for (auto& x : r.surprisals) x = mean + rng.normal();
      docs.push_back(std::move(r));
    }
    write_surprisal_jsonl(dir / (name + ".jsonl"), docs);
  };
  write_side("human", 3.0, 1);
  write_side("machine", 2.5, 2);
  json doc = {{"seed", 5},
              {"source", {{"type", "jsonl"}, {"human", "human.jsonl"}, {"machine", "machine.jsonl"}}},
              {"k_values", {3}},
              {"n_ref_samples", {40}},
              {"n_test", 20}};
  const ExperimentConfig config = experiment_config_from_json(doc, dir);
  const ExperimentResult r = run_experiment(config);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].test_length, 0);
  EXPECT_GT(r.rows[0].eval.auroc, 0.9);
  doc["n_ref_samples"] = {50};
  EXPECT_ERRC(run_experiment(experiment_config_from_json(doc, dir)), Errc::Config, "n_ref_samples");
  std::filesystem::remove_all(dir);
}

TEST(Bench, ShapeAndErrors) {
  Xoshiro256 rng(3);
  const auto make = [&](int n, double mean) {
    std::vector<SurprisalRecord> docs;
    for (int i = 0; i < n; ++i) {
      SurprisalRecord r{"d" + std::to_string(i), std::nullopt, std::vector<double>(100)};
      for (auto& x : r.surprisals) x = mean + rng.normal();
      docs.push_back(std::move(r));
    }
    return docs;
  };
  const auto human = make(10, 3.0), machine = make(10, 2.0), docs = make(9, 2.5);
  const BenchReport report = throughput_bench(human, machine, docs, 2);
  EXPECT_EQ(report.item_ms.size(), 9u);
  ASSERT_FALSE(report.curve.empty());
  EXPECT_EQ(report.curve.back().items, 9u);
  for (std::size_t i = 1; i < report.curve.size(); ++i) {
    EXPECT_GT(report.curve[i].items, report.curve[i - 1].items);
    EXPECT_GE(report.curve[i].items_per_second, report.curve[i - 1].items_per_second);
  }
  EXPECT_TRUE(to_json(report)["machine_dependent"].get<bool>());
  EXPECT_ERRC(throughput_bench(human, machine, docs, 0), Errc::InvalidSpec);
  EXPECT_ERRC(throughput_bench(human, machine, {}, 1), Errc::EmptyInput);
}
