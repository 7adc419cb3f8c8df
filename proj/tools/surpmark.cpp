// surpmark command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "surpmark/detector.hpp"
#include "surpmark/eval.hpp"
#include "surpmark/io.hpp"
#include "surpmark/ngram.hpp"
#include "surpmark/rng.hpp"
#include "surpmark/synth.hpp"
#include "surpmark/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace surpmark;

namespace {

const std::map<std::string, GjsMode> kModes{{"joint", GjsMode::Joint},
                                           {"constant-mix", GjsMode::ConstantMix}};
const std::map<std::string, AlphaPolicy> kAlphas{{"per-side", AlphaPolicy::PerSide},
                                                {"single", AlphaPolicy::Single}};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Config, path.string() + " is not valid JSON: " + e.what());
  }
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw Error(Errc::Io, "failed writing " + path);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  }
  return out;
}

struct ScoreFlags {
  std::string mode = "joint";
  std::string alpha = "per-side";
  std::optional<double> tau;
  std::size_t threads = 0;

  void attach(CLI::App* cmd, bool with_tau) {
    cmd->add_option("--mode", mode, "GJS mixture mode")->check(CLI::IsMember({"joint", "constant-mix"}));
    cmd->add_option("--alpha", alpha, "reference weight policy")->check(CLI::IsMember({"per-side", "single"}));
    cmd->add_option("--threads", threads, "worker threads (0 = default, capped by SURPMARK_THREADS)");
    if (with_tau) cmd->add_option("--tau", tau, "decision threshold: machine iff delta_gjs <= tau");
  }
  ScoreOptions options() const { return {kModes.at(mode), kAlphas.at(alpha), tau}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SurpMark: machine-generated text detection from surprisal dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "surpmark 0.1.0");

  // build-ref
  auto* build = app.add_subcommand("build-ref", "build a reference pack from labelled surprisal corpora");
  std::string human_path, machine_path, out_path;
  std::optional<int> k;
  bool skip_short = false;
  build->add_option("--human", human_path, "human surprisal JSONL")->required()->check(CLI::ExistingFile);
  build->add_option("--machine", machine_path, "machine surprisal JSONL")->required()->check(CLI::ExistingFile);
  build->add_option("--out", out_path, "pack destination")->required();
  build->add_option("--k", k, "number of quantizer states (default: from corpus size)")
      ->check(CLI::PositiveNumber);
  build->add_flag("--skip-short", skip_short, "drop records with fewer than 2 surprisals");

  // score
  auto* score = app.add_subcommand("score", "score surprisal records against a pack");
  std::string pack_path, in_path;
  ScoreFlags score_flags;
  score->add_option("--pack", pack_path, "reference pack")->required()->check(CLI::ExistingFile);
  score->add_option("--in", in_path, "surprisal JSONL to score")->required()->check(CLI::ExistingFile);
  score->add_option("--out", out_path, "JSONL destination (default stdout)");
  score_flags.attach(score, true);

  // eval
  auto* eval = app.add_subcommand("eval", "AUROC of a pack on labelled records, or run an experiment config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  ScoreFlags eval_flags;
  eval->add_option("--pack", pack_path, "reference pack")->check(CLI::ExistingFile);
  eval->add_option("--in", in_path, "labelled surprisal JSONL")->check(CLI::ExistingFile);
  eval->add_option("--config", config_path, "experiment config JSON")->check(CLI::ExistingFile);
  eval->add_option("--out", out_path, "output file (pack mode) or directory (config mode)");
  eval->add_option("--seed", seed, "override the config seed");
  eval_flags.attach(eval, false);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "bias/variance sweep over the number of states");
  sweep->add_option("--config", config_path, "sweep config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_path, "output directory")->required();
  sweep->add_option("--seed", seed, "override the config seed");

  // simulate-theory
  auto* theory = app.add_subcommand("simulate-theory", "predicted vs simulated moments of the score");
  theory->add_option("--config", config_path, "theory config JSON")->required()->check(CLI::ExistingFile);
  theory->add_option("--out", out_path, "report destination (default stdout)");
  theory->add_option("--seed", seed, "override the config seed");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "sample pseudo-surprisal records from an emission spec");
  std::size_t count = 0, length = 0;
  std::string label_text, id_prefix = "doc";
  gen->add_option("--config", config_path, "emission spec JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--count", count, "number of records")->required()->check(CLI::PositiveNumber);
  gen->add_option("--length", length, "surprisals per record")->required()->check(CLI::Range(2, 1 << 30));
  gen->add_option("--seed", seed, "random seed")->required();
  gen->add_option("--label", label_text, "record label")->check(CLI::IsMember({"human", "machine"}));
  gen->add_option("--id-prefix", id_prefix, "record id prefix");
  gen->add_option("--out", out_path, "JSONL destination (default stdout)");

  // ngram-surprisals
  auto* ngram = app.add_subcommand("ngram-surprisals", "surprisals of text lines under a toy n-gram model");
  std::string train_path;
  int order = 2;
  double delta = 0.1;
  bool chars = false;
  ngram->add_option("--train", train_path, "training text, one document per line")->required()->check(
      CLI::ExistingFile);
  ngram->add_option("--in", in_path, "text to score, one document per line")->required()->check(
      CLI::ExistingFile);
  ngram->add_option("--order", order, "n-gram order")->check(CLI::PositiveNumber);
  ngram->add_option("--delta", delta, "add-delta smoothing constant")->check(CLI::PositiveNumber);
  ngram->add_option("--label", label_text, "record label")->check(CLI::IsMember({"human", "machine"}));
  ngram->add_option("--id-prefix", id_prefix, "record id prefix");
  ngram->add_flag("--chars", chars, "tokenize into characters instead of words");
  ngram->add_option("--out", out_path, "JSONL destination (default stdout)");

  // pack-info
  auto* info = app.add_subcommand("pack-info", "print a pack's k, reference sizes and metadata");
  info->add_option("pack", pack_path, "reference pack")->required()->check(CLI::ExistingFile);

  // bench
  auto* bench = app.add_subcommand("bench", "throughput of pack build plus scoring (machine-dependent)");
  std::size_t repetitions = 3;
  bench->add_option("--human", human_path, "human surprisal JSONL")->required()->check(CLI::ExistingFile);
  bench->add_option("--machine", machine_path, "machine surprisal JSONL")->required()->check(CLI::ExistingFile);
  bench->add_option("--in", in_path, "records to score")->required()->check(CLI::ExistingFile);
  bench->add_option("--repetitions", repetitions, "timing repetitions");
  bench->add_option("--k", k, "number of quantizer states")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*build) {
      BuildOptions opts;
      opts.k = k;
      opts.skip_short = skip_short;
      opts.metadata = {{"human_source", fs::path(human_path).filename().string()},
                       {"machine_source", fs::path(machine_path).filename().string()}};
      const ReferencePack pack =
          build_references(read_surprisal_jsonl(fs::path(human_path)), read_surprisal_jsonl(fs::path(machine_path)), opts);
      save_pack(pack, out_path);
      std::cerr << "wrote " << out_path << ": k=" << pack.quantizer.k() << " N_machine=" << pack.n_machine()
                << " N_human=" << pack.n_human() << "\n";
    } else if (*score) {
      const ReferencePack pack = load_pack(pack_path);
      const auto outcomes = score_batch(pack, read_surprisal_jsonl(fs::path(in_path)), score_flags.options(),
                                        score_flags.threads);
      std::string text;
      std::size_t failed = 0;
      for (const auto& o : outcomes) {
        text += outcome_to_json(o).dump() + "\n";
        failed += !o.ok();
      }
      emit(out_path, text);
      if (failed) std::cerr << "warning: " << failed << " of " << outcomes.size() << " records failed\n";
    } else if (*eval) {
      if (!config_path.empty()) {
        if (!pack_path.empty() || !in_path.empty()) {
          std::cerr << "usage error: --config cannot be combined with --pack/--in\n";
          return 2;
        }
        if (out_path.empty()) {
          std::cerr << "usage error: --out <dir> is required with --config\n";
          return 2;
        }
        json doc = read_json_file(config_path);
        if (seed) doc["seed"] = *seed;
        ExperimentConfig config = experiment_config_from_json(doc, fs::path(config_path).parent_path());
        if (eval->count("--threads")) config.threads = eval_flags.threads;
        const ExperimentResult result = run_experiment(config, out_path);
        std::cout << experiment_csv(config, result);
      } else {
        if (pack_path.empty()) {
          std::cerr << "usage error: --pack is required (or use --config)\n";
          return 2;
        }
        if (in_path.empty()) {
          std::cerr << "usage error: --in is required (or use --config)\n";
          return 2;
        }
        const ReferencePack pack = load_pack(pack_path);
        const auto docs = read_surprisal_jsonl(fs::path(in_path));
        const auto outcomes = score_batch(pack, docs, eval_flags.options(), eval_flags.threads);
        std::vector<double> human, machine;
        std::size_t unlabelled = 0, failed = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
          if (!outcomes[i].ok()) {
            ++failed;
          } else if (!docs[i].label) {
            ++unlabelled;
          } else {
            (*docs[i].label == Label::Human ? human : machine).push_back(outcomes[i].report->delta_gjs);
          }
        }
        json report = to_json(auroc(human, machine));
        const ThresholdChoice t = best_threshold(human, machine);
        report["best_threshold"] = {{"tau", t.tau}, {"balanced_accuracy", t.balanced_accuracy}};
        report["skipped"] = {{"unlabelled", unlabelled}, {"failed", failed}};
        emit(out_path, report.dump(2) + "\n");
      }
    } else if (*sweep) {
      json doc = read_json_file(config_path);
      if (seed) doc["seed"] = *seed;
      const SweepConfig config = sweep_config_from_json(doc);
      const SweepResult result = k_tradeoff_sweep(config);
      fs::create_directories(out_path);
      emit((fs::path(out_path) / "sweep.csv").string(), sweep_csv(result));
      emit((fs::path(out_path) / "sweep_summary.json").string(), sweep_summary(config, result).dump(2) + "\n");
      std::cout << sweep_csv(result);
    } else if (*theory) {
      json doc = read_json_file(config_path);
      if (seed) doc["seed"] = *seed;
      emit(out_path, simulate_theory(theory_config_from_json(doc)).dump(2) + "\n");
    } else if (*gen) {
      const EmissionSpec spec = emission_from_json(read_json_file(config_path));
      const std::optional<Label> label = label_text.empty() ? std::nullopt : parse_label(label_text);
      std::vector<SurprisalRecord> records(count);
      for (std::size_t i = 0; i < count; ++i) {
        Xoshiro256 rng = Xoshiro256::stream(*seed, i);
        records[i] = {id_prefix + "-" + std::to_string(i), label, sample_emissions(spec, length, rng).values};
      }
      std::ostringstream out;
      write_surprisal_jsonl(out, records);
      emit(out_path, out.str());
    } else if (*ngram) {
      const auto tokenize = [&](const std::string& line) { return chars ? split_chars(line) : split_words(line); };
      std::vector<TokenSequence> corpus;
      for (const auto& line : lines_of(read_text_file(train_path))) corpus.push_back(tokenize(line));
      const NgramLM lm = fit_ngram_lm(corpus, order, delta);
      const std::optional<Label> label = label_text.empty() ? std::nullopt : parse_label(label_text);
      std::vector<SurprisalRecord> records;
      std::size_t index = 0;
      for (const auto& line : lines_of(read_text_file(in_path))) {
        const std::string id = id_prefix + "-" + std::to_string(index++);
        const TokenSequence tokens = tokenize(line);
        if (tokens.size() < 2) {
          std::cerr << "warning: skipping " << id << ": fewer than two tokens\n";
          continue;
        }
        records.push_back(ngram_surprisals(lm, tokens, id, label));
      }
      std::ostringstream out;
      write_surprisal_jsonl(out, records);
      emit(out_path, out.str());
    } else if (*info) {
      const ReferencePack pack = load_pack(pack_path);
      const json summary = {{"format_version", pack.format_version},
                            {"k", pack.quantizer.k()},
                            {"n_machine", pack.n_machine()},
                            {"n_human", pack.n_human()},
                            {"boundaries", pack.quantizer.boundaries},
                            {"metadata", pack.metadata}};
      std::cout << summary.dump(2) << "\n";
    } else if (*bench) {
      BuildOptions opts;
      opts.k = k;
      const BenchReport report =
          throughput_bench(read_surprisal_jsonl(fs::path(human_path)), read_surprisal_jsonl(fs::path(machine_path)),
                           read_surprisal_jsonl(fs::path(in_path)), repetitions, opts);
      std::cout << to_json(report).dump(2) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
