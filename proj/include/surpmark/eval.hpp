#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surpmark/detector.hpp"
#include "surpmark/synth.hpp"

namespace surpmark {

struct ScoreSummary {
  double mean = 0.0;
  double stddev = 0.0;  // unbiased; 0 for a single score
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

/// Human is the positive class: human texts are expected to score higher.
struct EvalResult {
  double auroc = 0.5;
  std::size_t n_positive = 0;  // human
  std::size_t n_negative = 0;  // machine
  ScoreSummary human;
  ScoreSummary machine;
};

/// Linear-interpolation quantiles over the sorted scores. Throws EmptyInput.
ScoreSummary summarize_scores(std::vector<double> scores);

/// P(human > machine) + 0.5 P(human == machine) via midranks.
/// Throws EmptyClass naming the empty side, NonFiniteValue.
EvalResult auroc(const std::vector<double>& human_scores, const std::vector<double>& machine_scores);

nlohmann::json to_json(const EvalResult& result);

/// Threshold maximizing balanced accuracy for the rule "machine iff score <= tau".
struct ThresholdChoice {
  double tau = 0.0;
  double balanced_accuracy = 0.0;
};
ThresholdChoice best_threshold(const std::vector<double>& human_scores,
                               const std::vector<double>& machine_scores);

// --- experiment harness ---------------------------------------------------

struct ExperimentConfig {
  enum class Source { Synthetic, Jsonl };
  Source source = Source::Synthetic;
  // synthetic
  std::optional<EmissionSpec> machine_spec;
  std::optional<EmissionSpec> human_spec;
  std::int64_t reference_transitions = 200;  // per synthetic reference document
  // jsonl
  std::filesystem::path human_path;
  std::filesystem::path machine_path;

  std::uint64_t seed = 0;
  std::vector<int> k_values;  // empty means default_bins per pack
  std::vector<std::size_t> n_ref_samples;
  std::size_t n_test = 100;  // per class
  std::vector<std::int64_t> test_lengths;  // transitions; empty keeps full documents
  ScoreOptions score;
  std::size_t threads = 0;
  bool record_runtime = false;
  nlohmann::json raw = nlohmann::json::object();
};

/// Relative jsonl paths resolve against `base_dir`. Throws Config naming the field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc,
                                             const std::filesystem::path& base_dir = {});

struct ExperimentRow {
  int k = 0;
  std::size_t n_ref_samples = 0;
  std::int64_t test_length = 0;  // 0 when documents are not truncated
  EvalResult eval;
  double runtime_ms = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // k-major, then reference size, then test length
  std::size_t failed_documents = 0;
};

/// Deterministic in (config, seed); parallelism only changes runtime_ms.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV columns k,n_ref_samples,test_length,auroc and, with record_runtime, runtime_ms.
std::string experiment_csv(const ExperimentConfig& config, const ExperimentResult& result);
nlohmann::json experiment_manifest(const ExperimentConfig& config, const ExperimentResult& result);

/// Runs the experiment and writes results.csv and manifest.json into out_dir. Throws Io.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// --- throughput --------------------------------------------------------------

struct ThroughputPoint {
  std::size_t items = 0;
  double items_per_second = 0.0;
};

/// Wall-clock measurements; machine-dependent and never used as a gate.
struct BenchReport {
  double build_ms = 0.0;             // fastest pack build over the repetitions
  double mean_item_ms = 0.0;         // mean over items of the fastest per-item latency
  std::vector<double> item_ms;       // fastest latency per item
  std::vector<ThroughputPoint> curve;  // items / (build + items * mean_item) on a doubling grid
  std::size_t repetitions = 0;
};

/// Throws InvalidSpec (repetitions == 0), EmptyInput (no docs), and build errors.
BenchReport throughput_bench(const std::vector<SurprisalRecord>& human,
                             const std::vector<SurprisalRecord>& machine,
                             const std::vector<SurprisalRecord>& docs, std::size_t repetitions,
                             const BuildOptions& build = {}, const ScoreOptions& score = {});

nlohmann::json to_json(const BenchReport& report);

}  // namespace surpmark
