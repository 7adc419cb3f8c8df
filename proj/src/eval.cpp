#include "surpmark/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "surpmark/io.hpp"
#include "surpmark/rng.hpp"

namespace surpmark {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(Errc::Config, "config field '" + field + "': " + why);
}

enum Role : std::uint64_t { RefHuman = 0, RefMachine = 1, TestHuman = 2, TestMachine = 3 };

std::vector<SurprisalRecord> synthetic_docs(const EmissionSpec& spec, std::uint64_t seed, Role role,
                                            std::size_t count, std::int64_t transitions, Label label) {
  static constexpr const char* kNames[] = {"ref-human", "ref-machine", "test-human", "test-machine"};
  std::vector<SurprisalRecord> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Xoshiro256 rng = Xoshiro256::stream(seed, (static_cast<std::uint64_t>(role) << 40) + i);
    out[i].id = std::string(kNames[role]) + "-" + std::to_string(i);
    out[i].label = label;
    out[i].surprisals = sample_emissions(spec, static_cast<std::size_t>(transitions) + 1, rng).values;
  }
  return out;
}

void shuffle(std::vector<SurprisalRecord>& records, Xoshiro256& rng) {
  for (std::size_t i = records.size(); i > 1; --i) {
    std::swap(records[i - 1], records[rng.below(i)]);
  }
}

std::vector<SurprisalRecord> truncated(const std::vector<SurprisalRecord>& docs, std::int64_t transitions) {
  std::vector<SurprisalRecord> out = docs;
  if (transitions <= 0) return out;
  for (auto& doc : out) {
    const auto keep = static_cast<std::size_t>(transitions) + 1;
    if (doc.surprisals.size() > keep) doc.surprisals.resize(keep);
  }
  return out;
}

json summary_json(const ScoreSummary& s) {
  return {{"mean", s.mean},     {"stddev", s.stddev}, {"min", s.min}, {"q25", s.q25},
          {"median", s.median}, {"q75", s.q75},       {"max", s.max}};
}

}  // namespace

ScoreSummary summarize_scores(std::vector<double> scores) {
  if (scores.empty()) throw Error(Errc::EmptyInput, "no scores to summarize");
  std::sort(scores.begin(), scores.end());
  ScoreSummary s;
  const auto n = static_cast<double>(scores.size());
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : scores) ss += (v - s.mean) * (v - s.mean);
  s.stddev = scores.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = scores.front();
  s.max = scores.back();
  s.q25 = quantile_sorted(scores, 0.25);
  s.median = quantile_sorted(scores, 0.5);
  s.q75 = quantile_sorted(scores, 0.75);
  return s;
}

EvalResult auroc(const std::vector<double>& human_scores, const std::vector<double>& machine_scores) {
  if (human_scores.empty()) throw Error(Errc::EmptyClass, "no human scores");
  if (machine_scores.empty()) throw Error(Errc::EmptyClass, "no machine scores");
  struct Item {
    double score;
    bool human;
  };
  std::vector<Item> items;
  items.reserve(human_scores.size() + machine_scores.size());
  for (double v : human_scores) items.push_back({v, true});
  for (double v : machine_scores) items.push_back({v, false});
  for (const Item& it : items) {
    if (!std::isfinite(it.score)) throw Error(Errc::NonFiniteValue, "scores must be finite");
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sum of human midranks (1-based).
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    std::size_t humans = 0;
    while (j < items.size() && items[j].score == items[i].score) humans += items[j++].human;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += midrank * static_cast<double>(humans);
    i = j;
  }
  const auto nh = static_cast<double>(human_scores.size());
  const auto nm = static_cast<double>(machine_scores.size());

  EvalResult out;
  out.auroc = (rank_sum - nh * (nh + 1.0) / 2.0) / (nh * nm);
  out.n_positive = human_scores.size();
  out.n_negative = machine_scores.size();
  out.human = summarize_scores(human_scores);
  out.machine = summarize_scores(machine_scores);
  return out;
}

json to_json(const EvalResult& r) {
  return {{"auroc", r.auroc},
          {"n_positive", r.n_positive},
          {"n_negative", r.n_negative},
          {"positive_class", "human"},
          {"human", summary_json(r.human)},
          {"machine", summary_json(r.machine)}};
}

ThresholdChoice best_threshold(const std::vector<double>& human_scores,
                               const std::vector<double>& machine_scores) {
  if (human_scores.empty()) throw Error(Errc::EmptyClass, "no human scores");
  if (machine_scores.empty()) throw Error(Errc::EmptyClass, "no machine scores");
  std::vector<double> candidates = human_scores;
  candidates.insert(candidates.end(), machine_scores.begin(), machine_scores.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<double> h = human_scores;
  std::vector<double> m = machine_scores;
  std::sort(h.begin(), h.end());
  std::sort(m.begin(), m.end());

  ThresholdChoice best{candidates.front(), -1.0};
  for (double tau : candidates) {
    const auto machine_hit = static_cast<double>(std::upper_bound(m.begin(), m.end(), tau) - m.begin());
    const auto human_miss = static_cast<double>(std::upper_bound(h.begin(), h.end(), tau) - h.begin());
    const double bacc = 0.5 * (machine_hit / static_cast<double>(m.size()) +
                               1.0 - human_miss / static_cast<double>(h.size()));
    if (bacc > best.balanced_accuracy) best = {tau, bacc};
  }
  return best;
}

ExperimentConfig experiment_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(Errc::Config, "experiment config must be a JSON object");
  ExperimentConfig c;
  c.raw = doc;

  const auto seed = doc.find("seed");
  if (seed == doc.end() || !is_nonnegative_integer(*seed)) bad_field("seed", "expected a nonnegative integer");
  c.seed = seed->get<std::uint64_t>();

  const auto source = doc.find("source");
  if (source == doc.end() || !source->is_object()) bad_field("source", "expected an object");
  const std::string type = source->value("type", "");
  if (type == "synthetic") {
    c.source = ExperimentConfig::Source::Synthetic;
    for (const char* side : {"machine", "human"}) {
      const auto it = source->find(side);
      if (it == source->end()) bad_field(std::string("source.") + side, "missing emission spec");
      try {
        (std::string(side) == "machine" ? c.machine_spec : c.human_spec) = emission_from_json(*it);
      } catch (const Error& e) {
        bad_field(std::string("source.") + side, e.what());
      }
    }
    const auto len = source->find("reference_transitions");
    if (len != source->end()) {
      if (!len->is_number_integer() || len->get<std::int64_t>() < 1) {
        bad_field("source.reference_transitions", "expected a positive integer");
      }
      c.reference_transitions = len->get<std::int64_t>();
    }
  } else if (type == "jsonl") {
    c.source = ExperimentConfig::Source::Jsonl;
    for (const char* side : {"human", "machine"}) {
      const auto it = source->find(side);
      if (it == source->end() || !it->is_string()) bad_field(std::string("source.") + side, "expected a path");
      std::filesystem::path p = it->get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      (std::string(side) == "human" ? c.human_path : c.machine_path) = p;
    }
  } else {
    bad_field("source.type", "expected \"synthetic\" or \"jsonl\"");
  }

  if (const auto k = doc.find("k_values"); k != doc.end() && !(k->is_string() && *k == "auto")) {
    if (!k->is_array() || k->empty()) bad_field("k_values", "expected \"auto\" or a non-empty array");
    for (const auto& v : *k) {
      if (!v.is_number_integer() || v.get<int>() < 1) bad_field("k_values", "entries must be positive integers");
      c.k_values.push_back(v.get<int>());
    }
  }

  const auto refs = doc.find("n_ref_samples");
  if (refs == doc.end() || !refs->is_array() || refs->empty()) bad_field("n_ref_samples", "expected a non-empty array");
  for (const auto& v : *refs) {
    if (!is_nonnegative_integer(v) || v.get<std::size_t>() < 1) bad_field("n_ref_samples", "entries must be positive integers");
    c.n_ref_samples.push_back(v.get<std::size_t>());
  }

  if (const auto n = doc.find("n_test"); n != doc.end()) {
    if (!is_nonnegative_integer(*n) || n->get<std::size_t>() < 1) bad_field("n_test", "expected a positive integer");
    c.n_test = n->get<std::size_t>();
  }
  if (const auto lens = doc.find("test_lengths"); lens != doc.end()) {
    if (!lens->is_array()) bad_field("test_lengths", "expected an array");
    for (const auto& v : *lens) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) bad_field("test_lengths", "entries must be positive integers");
      c.test_lengths.push_back(v.get<std::int64_t>());
    }
  }
  if (c.source == ExperimentConfig::Source::Synthetic && c.test_lengths.empty()) {
    c.test_lengths.push_back(c.reference_transitions);
  }
  if (const auto mode = doc.find("mode"); mode != doc.end()) {
    const auto parsed = mode->is_string() ? parse_gjs_mode(mode->get<std::string>()) : std::nullopt;
    if (!parsed) bad_field("mode", "expected \"joint\" or \"constant-mix\"");
    c.score.mode = *parsed;
  }
  if (const auto alpha = doc.find("alpha"); alpha != doc.end()) {
    const auto parsed = alpha->is_string() ? parse_alpha_policy(alpha->get<std::string>()) : std::nullopt;
    if (!parsed) bad_field("alpha", "expected \"per-side\" or \"single\"");
    c.score.alpha = *parsed;
  }
  if (const auto threads = doc.find("threads"); threads != doc.end()) {
    if (!is_nonnegative_integer(*threads)) bad_field("threads", "expected a nonnegative integer");
    c.threads = threads->get<std::size_t>();
  }
  if (const auto rt = doc.find("record_runtime"); rt != doc.end()) {
    if (!rt->is_boolean()) bad_field("record_runtime", "expected a boolean");
    c.record_runtime = rt->get<bool>();
  }
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::size_t max_ref = *std::max_element(config.n_ref_samples.begin(), config.n_ref_samples.end());
  std::vector<SurprisalRecord> ref_human, ref_machine, test_human, test_machine;

  if (config.source == ExperimentConfig::Source::Synthetic) {
    if (!config.machine_spec || !config.human_spec) throw Error(Errc::Config, "synthetic source needs both specs");
    const std::int64_t test_len = *std::max_element(config.test_lengths.begin(), config.test_lengths.end());
    ref_human = synthetic_docs(*config.human_spec, config.seed, RefHuman, max_ref,
                               config.reference_transitions, Label::Human);
    ref_machine = synthetic_docs(*config.machine_spec, config.seed, RefMachine, max_ref,
                                 config.reference_transitions, Label::Machine);
    test_human = synthetic_docs(*config.human_spec, config.seed, TestHuman, config.n_test, test_len, Label::Human);
    test_machine =
        synthetic_docs(*config.machine_spec, config.seed, TestMachine, config.n_test, test_len, Label::Machine);
  } else {
    auto human = read_surprisal_jsonl(config.human_path);
    auto machine = read_surprisal_jsonl(config.machine_path);
    Xoshiro256 rng(config.seed);
    shuffle(human, rng);
    shuffle(machine, rng);
    for (auto* side : {&human, &machine}) {
      if (side->size() < config.n_test + max_ref) {
        throw Error(Errc::Config, "config field 'n_ref_samples': a jsonl corpus has " +
                                      std::to_string(side->size()) + " records, fewer than n_test + " +
                                      std::to_string(max_ref));
      }
    }
    test_human.assign(human.begin(), human.begin() + static_cast<std::ptrdiff_t>(config.n_test));
    ref_human.assign(human.begin() + static_cast<std::ptrdiff_t>(config.n_test), human.end());
    test_machine.assign(machine.begin(), machine.begin() + static_cast<std::ptrdiff_t>(config.n_test));
    ref_machine.assign(machine.begin() + static_cast<std::ptrdiff_t>(config.n_test), machine.end());
  }

  std::vector<std::optional<int>> ks;
  if (config.k_values.empty()) ks.emplace_back();
  for (int k : config.k_values) ks.emplace_back(k);
  std::vector<std::int64_t> lengths = config.test_lengths;
  if (lengths.empty()) lengths.push_back(0);

  ExperimentResult result;
  for (const auto& k : ks) {
    for (std::size_t n_ref : config.n_ref_samples) {
      const std::vector<SurprisalRecord> h(ref_human.begin(), ref_human.begin() + static_cast<std::ptrdiff_t>(n_ref));
      const std::vector<SurprisalRecord> m(ref_machine.begin(), ref_machine.begin() + static_cast<std::ptrdiff_t>(n_ref));
      for (std::int64_t len : lengths) {
        const auto start = Clock::now();
        BuildOptions build;
        build.k = k;
        build.skip_short = true;
        const ReferencePack pack = build_references(h, m, build);
        std::vector<double> human_scores, machine_scores;
        for (const auto& [docs, scores] : {std::pair{truncated(test_human, len), &human_scores},
                                           std::pair{truncated(test_machine, len), &machine_scores}}) {
          for (const ScoreOutcome& o : score_batch(pack, docs, config.score, config.threads)) {
            if (o.ok()) {
              scores->push_back(o.report->delta_gjs);
            } else {
              ++result.failed_documents;
            }
          }
        }
        ExperimentRow row;
        row.k = pack.quantizer.k();
        row.n_ref_samples = n_ref;
        row.test_length = len;
        row.eval = auroc(human_scores, machine_scores);
        row.runtime_ms = elapsed_ms(start);
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

std::string experiment_csv(const ExperimentConfig& config, const ExperimentResult& result) {
  std::string out = config.record_runtime ? "k,n_ref_samples,test_length,auroc,runtime_ms\n"
                                          : "k,n_ref_samples,test_length,auroc\n";
  for (const ExperimentRow& row : result.rows) {
    out += std::to_string(row.k) + ',' + std::to_string(row.n_ref_samples) + ',' +
           std::to_string(row.test_length) + ',' + format_double(row.eval.auroc);
    if (config.record_runtime) out += ',' + format_double(row.runtime_ms);
    out += '\n';
  }
  return out;
}

json experiment_manifest(const ExperimentConfig& config, const ExperimentResult& result) {
  json rows = json::array();
  for (const ExperimentRow& row : result.rows) {
    json r = to_json(row.eval);
    r["k"] = row.k;
    r["n_ref_samples"] = row.n_ref_samples;
    r["test_length"] = row.test_length;
    rows.push_back(std::move(r));
  }
  return {{"tool", "surpmark"},
          {"config", config.raw},
          {"seed", config.seed},
          {"failed_documents", result.failed_documents},
          {"outputs", {"results.csv"}},
          {"rows", std::move(rows)}};
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  ExperimentResult result = run_experiment(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out.flush()) throw Error(Errc::Io, "failed writing " + path.string());
  };
  write(out_dir / "results.csv", experiment_csv(config, result));
  write(out_dir / "manifest.json", experiment_manifest(config, result).dump(2) + "\n");
  return result;
}

BenchReport throughput_bench(const std::vector<SurprisalRecord>& human,
                             const std::vector<SurprisalRecord>& machine,
                             const std::vector<SurprisalRecord>& docs, std::size_t repetitions,
                             const BuildOptions& build, const ScoreOptions& score) {
  if (repetitions == 0) throw Error(Errc::InvalidSpec, "repetitions must be at least 1");
  if (docs.empty()) throw Error(Errc::EmptyInput, "no documents to benchmark");
  BenchReport report;
  report.repetitions = repetitions;
  report.build_ms = std::numeric_limits<double>::infinity();
  report.item_ms.assign(docs.size(), std::numeric_limits<double>::infinity());
  ReferencePack pack;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto start = Clock::now();
    pack = build_references(human, machine, build);
    report.build_ms = std::min(report.build_ms, elapsed_ms(start));
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto item_start = Clock::now();
      const ScoreReport r = score_text(pack, docs[i], score);
      const double ms = elapsed_ms(item_start);
      if (!std::isfinite(r.delta_gjs)) throw Error(Errc::NonFiniteValue, "non-finite score in benchmark");
      report.item_ms[i] = std::min(report.item_ms[i], ms);
    }
  }
  report.mean_item_ms =
      std::accumulate(report.item_ms.begin(), report.item_ms.end(), 0.0) / static_cast<double>(docs.size());
  for (std::size_t items = 1;; items = std::min(items * 2, docs.size())) {
    const double total_ms = report.build_ms + static_cast<double>(items) * report.mean_item_ms;
    report.curve.push_back({items, total_ms > 0.0 ? 1000.0 * static_cast<double>(items) / total_ms : 0.0});
    if (items == docs.size()) break;
  }
  return report;
}

json to_json(const BenchReport& r) {
  json curve = json::array();
  for (const auto& p : r.curve) curve.push_back({{"items", p.items}, {"items_per_second", p.items_per_second}});
  return {{"machine_dependent", true},
          {"repetitions", r.repetitions},
          {"build_ms", r.build_ms},
          {"mean_item_ms", r.mean_item_ms},
          {"min_item_ms", *std::min_element(r.item_ms.begin(), r.item_ms.end())},
          {"max_item_ms", *std::max_element(r.item_ms.begin(), r.item_ms.end())},
          {"curve", std::move(curve)}};
}

}  // namespace surpmark
