#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qintent/query.hpp"

namespace qintent {

/// One JSONL line: {"id"?, "query", "label"?, "confidence"?, "provenance"?}.
/// Fields outside that schema are kept in `extra` and written back after
/// the known ones.
struct Record {
  std::optional<std::string> id;
  std::string query;
  std::optional<std::string> label;
  std::optional<double> confidence;
  std::optional<std::string> provenance;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

/// Throws DataError on malformed JSON or missing/ill-typed fields.
Record parse_jsonl_record(std::string_view line);
/// Single line, no trailing newline.
std::string dump_record(const Record& r);

/// Column layout for tab-separated input. The defaults follow the ORCAS
/// distribution (query id, query text, document id, url).
struct TsvLayout {
  std::size_t query_column = 1;
  std::optional<std::size_t> id_column = 0;
  std::optional<std::size_t> label_column;
};

Record parse_tsv_record(std::string_view line, const TsvLayout& layout);

enum class InputFormat { Jsonl, Tsv };

/// Guesses from the extension; anything that is not .tsv/.txt is JSONL.
InputFormat format_for_path(const std::filesystem::path& p);

/// Calls `on_line(line_number, line)` for every non-empty line. Strips a
/// trailing CR.
void for_each_line(std::istream& in,
                   const std::function<void(std::size_t, std::string_view)>& on_line);

/// Strict reader: any malformed line throws DataError naming the line.
std::vector<Record> read_records(const std::filesystem::path& p, InputFormat fmt,
                                 const TsvLayout& layout = {});
std::vector<Record> read_jsonl(const std::filesystem::path& p);

void write_jsonl(const std::filesystem::path& p, const std::vector<Record>& records);

Query to_query(const Record& r);
/// Requires a label; the gold id is the explicit id or the content hash.
GoldRecord to_gold(const Record& r);
/// Requires a parseable label. Missing confidence means 1.
Prediction to_prediction(const Record& r, Provenance fallback = Provenance::Weak);

Record to_record(const Prediction& p, std::string_view query_text);

/// Gold sets must not repeat a normalized query text.
std::vector<GoldRecord> to_gold_set(const std::vector<Record>& records);

}  // namespace qintent
