#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "surpmark/detector.hpp"

namespace surpmark {

// Pack file: one UTF-8 JSON document with a top-level "format_version".
// Floats are written as shortest round-trip decimals, so save/load is lossless.
nlohmann::json pack_to_json(const ReferencePack& pack);
/// Throws VersionMismatch or Corrupt(field); never returns a partial pack.
ReferencePack pack_from_json(const nlohmann::json& doc);

std::string pack_to_string(const ReferencePack& pack);
/// Throws Corrupt for unparsable text.
ReferencePack pack_from_string(const std::string& text);

/// Throws Io.
void save_pack(const ReferencePack& pack, const std::filesystem::path& destination);
/// Throws Io, VersionMismatch, Corrupt.
ReferencePack load_pack(const std::filesystem::path& source);

// Surprisal JSON Lines: {"id": ..., "label": "human"|"machine"|null,
// "surprisals": [...]} per line. Unknown fields are ignored, blank lines
// skipped; the first bad line aborts with Parse naming its line number.
std::vector<SurprisalRecord> read_surprisal_jsonl(std::istream& in);
std::vector<SurprisalRecord> read_surprisal_jsonl(const std::filesystem::path& path);
void write_surprisal_jsonl(std::ostream& out, const std::vector<SurprisalRecord>& records);
void write_surprisal_jsonl(const std::filesystem::path& path,
                           const std::vector<SurprisalRecord>& records);

nlohmann::json record_to_json(const SurprisalRecord& record);
SurprisalRecord record_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const ScoreReport& report);
nlohmann::json outcome_to_json(const ScoreOutcome& outcome);

}  // namespace surpmark
