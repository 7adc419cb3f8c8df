#include "surpmark/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace surpmark {

using nlohmann::json;

namespace {

json counts_to_json(const TransitionCounts& counts) {
  json rows = json::array();
  for (int i = 0; i < counts.k(); ++i) {
    json row = json::array();
    for (int j = 0; j < counts.k(); ++j) row.push_back(counts(i, j));
    rows.push_back(std::move(row));
  }
  return {{"num_transitions", counts.num_transitions()}, {"counts", std::move(rows)}};
}

[[noreturn]] void corrupt(const std::string& field) {
  throw Error(Errc::Corrupt, "pack field '" + field + "' is missing or malformed");
}

const json& field(const json& parent, const char* name, const std::string& path) {
  if (!parent.is_object()) corrupt(path);
  const auto it = parent.find(name);
  if (it == parent.end()) corrupt(path.empty() ? name : path + "." + name);
  return *it;
}

std::vector<double> number_array(const json& node, const std::string& path) {
  if (!node.is_array()) corrupt(path);
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) corrupt(path);
    out.push_back(v.get<double>());
  }
  return out;
}

TransitionCounts counts_from_json(const json& node, int k, const std::string& path) {
  const json& rows = field(node, "counts", path);
  if (!rows.is_array() || static_cast<int>(rows.size()) != k) corrupt(path + ".counts");
  CountMatrix matrix(k, k);
  for (int i = 0; i < k; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != k) corrupt(path + ".counts");
    for (int j = 0; j < k; ++j) {
      const json& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number_integer() || cell.get<std::int64_t>() < 0) corrupt(path + ".counts");
      matrix(i, j) = cell.get<std::int64_t>();
    }
  }
  TransitionCounts counts = TransitionCounts::from_matrix(matrix);
  const json& total = field(node, "num_transitions", path);
  if (!total.is_number_integer() || total.get<std::int64_t>() != counts.num_transitions()) {
    corrupt(path + ".num_transitions");
  }
  if (counts.num_transitions() < 1) corrupt(path + ".num_transitions");
  return counts;
}

}  // namespace

json pack_to_json(const ReferencePack& pack) {
  return {
      {"format_version", pack.format_version},
      {"quantizer",
       {{"k", pack.quantizer.k()},
        {"boundaries", pack.quantizer.boundaries},
        {"centroids", pack.quantizer.centroids},
        {"fitted_on", pack.quantizer.fitted_on}}},
      {"machine", counts_to_json(pack.counts_machine)},
      {"human", counts_to_json(pack.counts_human)},
      {"n_machine", pack.n_machine()},
      {"n_human", pack.n_human()},
      {"metadata", pack.metadata},
  };
}

ReferencePack pack_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("document");
  const json& version = field(doc, "format_version", "");
  if (!version.is_number_integer()) corrupt("format_version");
  if (version.get<int>() != ReferencePack::kFormatVersion) {
    throw Error(Errc::VersionMismatch, "found format_version " + std::to_string(version.get<int>()) +
                                           ", supported " +
                                           std::to_string(ReferencePack::kFormatVersion));
  }

  ReferencePack pack;
  const json& q = field(doc, "quantizer", "");
  const json& k_node = field(q, "k", "quantizer");
  if (!k_node.is_number_integer() || k_node.get<int>() < 1) corrupt("quantizer.k");
  const int k = k_node.get<int>();
  pack.quantizer.boundaries = number_array(field(q, "boundaries", "quantizer"), "quantizer.boundaries");
  pack.quantizer.centroids = number_array(field(q, "centroids", "quantizer"), "quantizer.centroids");
  const json& fitted = field(q, "fitted_on", "quantizer");
  if (!fitted.is_number_integer() || fitted.get<std::int64_t>() < 0) corrupt("quantizer.fitted_on");
  pack.quantizer.fitted_on = fitted.get<std::uint64_t>();
  if (pack.quantizer.k() != k) corrupt("quantizer.centroids");
  pack.quantizer.validate();

  pack.counts_machine = counts_from_json(field(doc, "machine", ""), k, "machine");
  pack.counts_human = counts_from_json(field(doc, "human", ""), k, "human");
  const json& n_machine = field(doc, "n_machine", "");
  if (!n_machine.is_number_integer() || n_machine.get<std::int64_t>() != pack.n_machine()) {
    corrupt("n_machine");
  }
  const json& n_human = field(doc, "n_human", "");
  if (!n_human.is_number_integer() || n_human.get<std::int64_t>() != pack.n_human()) {
    corrupt("n_human");
  }
  if (const auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) corrupt("metadata");
    pack.metadata = *it;
  }
  return pack;
}

std::string pack_to_string(const ReferencePack& pack) { return pack_to_json(pack).dump(2) + "\n"; }

ReferencePack pack_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::Corrupt, std::string("pack is not valid JSON: ") + e.what());
  }
  return pack_from_json(doc);
}

void save_pack(const ReferencePack& pack, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + destination.string() + " for writing");
  out << pack_to_string(pack);
  if (!out.flush()) throw Error(Errc::Io, "failed writing " + destination.string());
}

ReferencePack load_pack(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + source.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return pack_from_string(buffer.str());
}

json record_to_json(const SurprisalRecord& record) {
  json out = {{"id", record.id}, {"surprisals", record.surprisals}};
  out["label"] = record.label ? json(std::string(to_string(*record.label))) : json(nullptr);
  return out;
}

SurprisalRecord record_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Parse, "record is not a JSON object");
  SurprisalRecord record;
  const auto id = doc.find("id");
  if (id == doc.end() || !id->is_string()) throw Error(Errc::Parse, "record needs a string 'id'");
  record.id = id->get<std::string>();
  if (const auto label = doc.find("label"); label != doc.end() && !label->is_null()) {
    if (!label->is_string()) throw Error(Errc::Parse, "'label' must be a string or null");
    record.label = parse_label(label->get<std::string>());
    if (!record.label) {
      throw Error(Errc::Parse, "unknown label '" + label->get<std::string>() + "'");
    }
  }
  const auto values = doc.find("surprisals");
  if (values == doc.end() || !values->is_array()) {
    throw Error(Errc::Parse, "record needs a 'surprisals' array");
  }
  record.surprisals.reserve(values->size());
  for (const auto& v : *values) {
    if (!v.is_number()) throw Error(Errc::Parse, "surprisals must be numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(Errc::Parse, "surprisals must be finite");
    record.surprisals.push_back(x);
  }
  return record;
}

std::vector<SurprisalRecord> read_surprisal_jsonl(std::istream& in) {
  std::vector<SurprisalRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(Errc::Parse, "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return records;
}

std::vector<SurprisalRecord> read_surprisal_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_surprisal_jsonl(in);
}

void write_surprisal_jsonl(std::ostream& out, const std::vector<SurprisalRecord>& records) {
  for (const auto& record : records) out << record_to_json(record).dump() << '\n';
}

void write_surprisal_jsonl(const std::filesystem::path& path,
                           const std::vector<SurprisalRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  write_surprisal_jsonl(out, records);
}

json report_to_json(const ScoreReport& report) {
  json out = {
      {"id", report.id},
      {"delta_gjs", report.delta_gjs},
      {"gjs_to_machine", report.gjs_to_machine},
      {"gjs_to_human", report.gjs_to_human},
      {"alpha_machine", report.alpha_machine},
      {"alpha_human", report.alpha_human},
      {"test_transitions", report.test_transitions},
  };
  out["verdict"] = report.verdict ? json(std::string(to_string(*report.verdict))) : json(nullptr);
  return out;
}

json outcome_to_json(const ScoreOutcome& outcome) {
  if (outcome.report) return report_to_json(*outcome.report);
  return {{"id", outcome.id},
          {"error",
           {{"code", std::string(to_string(outcome.error_code.value_or(Errc::Corrupt)))},
            {"message", outcome.error}}}};
}

}  // namespace surpmark
