#include "surpmark/detector.hpp"

#include <cmath>
#include <string>

#include "surpmark/parallel.hpp"

namespace surpmark {

std::string_view to_string(Label label) noexcept {
  return label == Label::Human ? "human" : "machine";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "human") return Label::Human;
  if (text == "machine") return Label::Machine;
  return std::nullopt;
}

namespace {

void require_finite(const SurprisalRecord& record) {
  for (std::size_t i = 0; i < record.surprisals.size(); ++i) {
    if (!std::isfinite(record.surprisals[i])) {
      throw Error(Errc::NonFiniteValue, "record '" + record.id + "' has a non-finite surprisal at index " +
                                            std::to_string(i));
    }
  }
}

// Collects the usable records of one corpus; short ones fail or are skipped.
std::vector<const SurprisalRecord*> usable_records(const std::vector<SurprisalRecord>& corpus,
                                                   std::vector<std::string>& too_short) {
  std::vector<const SurprisalRecord*> out;
  out.reserve(corpus.size());
  for (const auto& record : corpus) {
    require_finite(record);
    if (record.surprisals.size() < 2) {
      too_short.push_back(record.id);
      continue;
    }
    out.push_back(&record);
  }
  return out;
}

}  // namespace

ReferencePack build_references(const std::vector<SurprisalRecord>& human,
                               const std::vector<SurprisalRecord>& machine,
                               const BuildOptions& options) {
  if (human.empty()) throw Error(Errc::EmptyCorpus, "human corpus is empty");
  if (machine.empty()) throw Error(Errc::EmptyCorpus, "machine corpus is empty");

  std::vector<std::string> too_short;
  const auto human_docs = usable_records(human, too_short);
  const auto machine_docs = usable_records(machine, too_short);
  if (!too_short.empty() && !options.skip_short) {
    std::string listing;
    for (const auto& id : too_short) listing += (listing.empty() ? "" : ", ") + id;
    throw Error(Errc::RecordTooShort, "records with fewer than 2 surprisals: " + listing);
  }
  if (human_docs.empty()) throw Error(Errc::EmptyCorpus, "no usable human records");
  if (machine_docs.empty()) throw Error(Errc::EmptyCorpus, "no usable machine records");

  std::vector<double> pooled;
  std::uint64_t transitions = 0;
  for (const auto* docs : {&human_docs, &machine_docs}) {
    for (const SurprisalRecord* record : *docs) {
      pooled.insert(pooled.end(), record->surprisals.begin(), record->surprisals.end());
      transitions += record->surprisals.size() - 1;
    }
  }
  const int k = options.k.value_or(
      default_bins(transitions, options.bins_scale, options.k_min, options.k_max));

  ReferencePack pack;
  pack.quantizer = fit_quantizer(pooled, k);
  pack.counts_human = TransitionCounts(k);
  pack.counts_machine = TransitionCounts(k);
  for (const SurprisalRecord* record : human_docs) {
    pack.counts_human.add_sequence(quantize(pack.quantizer, record->surprisals));
  }
  for (const SurprisalRecord* record : machine_docs) {
    pack.counts_machine.add_sequence(quantize(pack.quantizer, record->surprisals));
  }
  pack.metadata = options.metadata.is_object() ? options.metadata : nlohmann::json::object();
  if (!too_short.empty()) pack.metadata["skipped_records"] = too_short;
  return pack;
}

ScoreReport score_text(const ReferencePack& pack, const SurprisalRecord& doc,
                       const ScoreOptions& options) {
  if (doc.surprisals.size() < 2) {
    throw Error(Errc::RecordTooShort, "record '" + doc.id + "' has fewer than 2 surprisals");
  }
  require_finite(doc);
  const StateSequence states = quantize(pack.quantizer, doc.surprisals);
  const TransitionCounts test = count_transitions(states, pack.quantizer.k());
  const DeltaBreakdown delta = delta_gjs_breakdown(
      pack.counts_machine, pack.counts_human, test, {options.mode, options.alpha});

  ScoreReport report;
  report.id = doc.id;
  report.delta_gjs = delta.score;
  report.gjs_to_machine = delta.to_machine.llr_scaled();
  report.gjs_to_human = delta.to_human.llr_scaled();
  report.alpha_machine = delta.to_machine.alpha;
  report.alpha_human = delta.to_human.alpha;
  report.test_transitions = test.num_transitions();
  if (options.tau) report.verdict = delta.score <= *options.tau ? Label::Machine : Label::Human;
  return report;
}

std::vector<ScoreOutcome> score_batch(const ReferencePack& pack,
                                      const std::vector<SurprisalRecord>& docs,
                                      const ScoreOptions& options, std::size_t threads) {
  std::vector<ScoreOutcome> out(docs.size());
  parallel_for(docs.size(), thread_count(threads), [&](std::size_t i) {
    ScoreOutcome& slot = out[i];
    slot.id = docs[i].id;
    try {
      slot.report = score_text(pack, docs[i], options);
    } catch (const Error& e) {
      slot.error_code = e.code();
      slot.error = e.what();
    }
  });
  return out;
}

ReferencePack swap_sides(ReferencePack pack) {
  std::swap(pack.counts_human, pack.counts_machine);
  return pack;
}

}  // namespace surpmark
