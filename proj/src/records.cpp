#include "qintent/records.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

namespace qintent {

using nlohmann::ordered_json;

namespace {

std::optional<std::string> optional_string(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace

Record parse_jsonl_record(std::string_view line) {
  ordered_json obj = ordered_json::parse(line, nullptr, false);
  if (obj.is_discarded()) throw DataError("malformed JSON");
  if (!obj.is_object()) throw DataError("record is not a JSON object");

  Record r;
  auto q = obj.find("query");
  if (q == obj.end() || !q->is_string()) throw DataError("record lacks a string \"query\" field");
  r.query = q->get<std::string>();
  r.id = optional_string(obj, "id");
  r.label = optional_string(obj, "label");
  r.provenance = optional_string(obj, "provenance");
  if (auto c = obj.find("confidence"); c != obj.end() && !c->is_null()) {
    if (!c->is_number()) throw DataError("field \"confidence\" must be a number");
    r.confidence = c->get<double>();
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto& k = it.key();
    if (k != "id" && k != "query" && k != "label" && k != "confidence" && k != "provenance")
      r.extra[k] = it.value();
  }
  return r;
}

std::string dump_record(const Record& r) {
  ordered_json obj = ordered_json::object();
  if (r.id) obj["id"] = *r.id;
  obj["query"] = r.query;
  if (r.label) obj["label"] = *r.label;
  if (r.confidence) obj["confidence"] = *r.confidence;
  if (r.provenance) obj["provenance"] = *r.provenance;
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) obj[it.key()] = it.value();
  return obj.dump(-1, ' ', false, nlohmann::detail::error_handler_t::replace);
}

Record parse_tsv_record(std::string_view line, const TsvLayout& layout) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  auto need = [&](std::size_t col) -> std::string_view {
    if (col >= cols.size())
      throw DataError("TSV line has " + std::to_string(cols.size()) + " columns, need column " +
                      std::to_string(col));
    return cols[col];
  };
  Record r;
  r.query = std::string(need(layout.query_column));
  if (layout.id_column && *layout.id_column < cols.size() && !cols[*layout.id_column].empty())
    r.id = std::string(cols[*layout.id_column]);
  if (layout.label_column) r.label = std::string(need(*layout.label_column));
  return r;
}

InputFormat format_for_path(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return (ext == ".tsv" || ext == ".txt") ? InputFormat::Tsv : InputFormat::Jsonl;
}

void for_each_line(std::istream& in,
                   const std::function<void(std::size_t, std::string_view)>& on_line) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view v = line;
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    if (v.empty()) continue;
    on_line(n, v);
  }
}

std::vector<Record> read_records(const std::filesystem::path& p, InputFormat fmt,
                                 const TsvLayout& layout) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::vector<Record> out;
  for_each_line(in, [&](std::size_t n, std::string_view line) {
    try {
      out.push_back(fmt == InputFormat::Jsonl ? parse_jsonl_record(line)
                                              : parse_tsv_record(line, layout));
    } catch (const DataError& e) {
      throw DataError(p.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  });
  return out;
}

std::vector<Record> read_jsonl(const std::filesystem::path& p) {
  return read_records(p, InputFormat::Jsonl);
}

void write_jsonl(const std::filesystem::path& p, const std::vector<Record>& records) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  for (const auto& r : records) out << dump_record(r) << '\n';
  if (!out) throw DataError("write failed for " + p.string());
}

Query to_query(const Record& r) { return Query::make(r.query, r.id); }

GoldRecord to_gold(const Record& r) {
  if (!r.label) throw DataError("gold record lacks a label");
  return GoldRecord{to_query(r), parse_label(*r.label)};
}

Prediction to_prediction(const Record& r, Provenance fallback) {
  if (!r.label) throw DataError("prediction lacks a label");
  Prediction p;
  p.query_id = to_query(r).id();
  p.label = parse_label(*r.label);
  p.confidence = r.confidence.value_or(1.0);
  p.provenance = r.provenance ? parse_provenance(*r.provenance) : fallback;
  if (auto d = r.extra.find("defaulted"); d != r.extra.end() && d->is_boolean())
    p.defaulted = d->get<bool>();
  validate(p);
  return p;
}

Record to_record(const Prediction& p, std::string_view query_text) {
  Record r;
  r.id = p.query_id;
  r.query = std::string(query_text);
  r.label = std::string(to_string(p.label));
  r.confidence = p.confidence;
  r.provenance = std::string(to_string(p.provenance));
  if (p.defaulted) r.extra["defaulted"] = true;
  return r;
}

std::vector<GoldRecord> to_gold_set(const std::vector<Record>& records) {
  std::vector<GoldRecord> gold;
  gold.reserve(records.size());
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    auto g = to_gold(r);
    if (!seen.insert(g.query.text()).second)
      throw DataError("duplicate gold query \"" + g.query.text() + "\"");
    gold.push_back(std::move(g));
  }
  return gold;
}

}  // namespace qintent
