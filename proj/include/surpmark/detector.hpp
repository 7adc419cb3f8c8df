#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surpmark/divergence.hpp"
#include "surpmark/error.hpp"
#include "surpmark/markov.hpp"
#include "surpmark/quantizer.hpp"

namespace surpmark {

enum class Label { Human, Machine };

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text);

/// One document's surprisal sequence (nats). A text of T tokens yields T-1
/// surprisals and therefore T-2 transitions.
struct SurprisalRecord {
  std::string id;
  std::optional<Label> label;
  std::vector<double> surprisals;

  bool operator==(const SurprisalRecord&) const = default;
};

/// Frozen offline artifact: the shared quantizer plus raw reference counts.
/// The machine corpus is the P side, the human corpus the Q side.
struct ReferencePack {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  Quantizer quantizer;
  TransitionCounts counts_machine;
  TransitionCounts counts_human;
  nlohmann::json metadata = nlohmann::json::object();

  std::int64_t n_machine() const noexcept { return counts_machine.num_transitions(); }
  std::int64_t n_human() const noexcept { return counts_human.num_transitions(); }

  bool operator==(const ReferencePack& other) const {
    return format_version == other.format_version && quantizer == other.quantizer &&
           counts_machine == other.counts_machine && counts_human == other.counts_human &&
           metadata == other.metadata;
  }
};

struct BuildOptions {
  std::optional<int> k;      // default_bins(total transitions) when absent
  double bins_scale = 0.75;
  int k_min = 2;
  int k_max = 12;
  bool skip_short = false;   // drop records with < 2 surprisals instead of failing
  nlohmann::json metadata = nlohmann::json::object();
};

/// Fits the shared quantizer on the pooled reference surprisals, discretises
/// every document and accumulates per-corpus counts without cross-document
/// transitions. Skipped record ids (skip_short) are listed in
/// metadata["skipped_records"].
///
/// Throws EmptyCorpus, RecordTooShort (listing every offending id),
/// NonFiniteValue, TooFewDistinctValues.
ReferencePack build_references(const std::vector<SurprisalRecord>& human,
                               const std::vector<SurprisalRecord>& machine,
                               const BuildOptions& options = {});

struct ScoreOptions {
  GjsMode mode = GjsMode::Joint;
  AlphaPolicy alpha = AlphaPolicy::PerSide;
  std::optional<double> tau;
};

/// Score of one document against a pack. delta_gjs <= tau means machine.
struct ScoreReport {
  std::string id;
  double delta_gjs = 0.0;
  double gjs_to_machine = 0.0;  // log-likelihood-ratio scale, see GjsBreakdown::llr_scaled
  double gjs_to_human = 0.0;
  double alpha_machine = 0.0;
  double alpha_human = 0.0;
  std::int64_t test_transitions = 0;
  std::optional<Label> verdict;

  bool operator==(const ScoreReport&) const = default;
};

/// Scores one document. Throws RecordTooShort, NonFiniteValue.
ScoreReport score_text(const ReferencePack& pack, const SurprisalRecord& doc,
                       const ScoreOptions& options = {});

/// Per-item outcome of batch scoring; exactly one of report/error is set.
struct ScoreOutcome {
  std::string id;
  std::optional<ScoreReport> report;
  std::optional<Errc> error_code;
  std::string error;

  bool ok() const noexcept { return report.has_value(); }
  bool operator==(const ScoreOutcome&) const = default;
};

/// Order-preserving batch scoring on up to `threads` workers (0 = default).
/// Failures are reported inline and never abort the batch.
std::vector<ScoreOutcome> score_batch(const ReferencePack& pack,
                                      const std::vector<SurprisalRecord>& docs,
                                      const ScoreOptions& options = {}, std::size_t threads = 0);

/// Classes swapped: the machine side becomes the human side and vice versa.
ReferencePack swap_sides(ReferencePack pack);

}  // namespace surpmark
