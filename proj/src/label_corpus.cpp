#include <omp.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <istream>
#include <ostream>

#include "qintent/labeling.hpp"

namespace qintent {

namespace {

constexpr std::size_t kMaxLoggedErrors = 20;

struct LineOutcome {
  std::string json;   // empty when the line was malformed
  std::string error;
  IntentLabel label = IntentLabel::Informational;
  bool defaulted = false;
};

LineOutcome label_line(std::string_view line, const FunctionSet& fs, const PosTagger& tagger,
                       const CorpusOptions& opts) {
  LineOutcome out;
  try {
    const Record rec = opts.format == InputFormat::Jsonl ? parse_jsonl_record(line)
                                                         : parse_tsv_record(line, opts.layout);
    const Query q = to_query(rec);
    const WeakLabel w = label(q, fs, tagger);
    out.json = dump_record(to_record(q, w, opts.with_votes));
    out.label = w.label;
    out.defaulted = w.defaulted;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

void account(CorpusReport& rep, std::size_t line_no, const LineOutcome& o, std::ostream& out) {
  ++rep.lines;
  if (o.json.empty()) {
    if (rep.malformed < kMaxLoggedErrors) spdlog::warn("line {}: {}", line_no, o.error);
    ++rep.malformed;
    return;
  }
  out << o.json << '\n';
  ++rep.labeled;
  ++rep.per_label[index_of(o.label)];
  rep.defaulted += o.defaulted;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

nlohmann::ordered_json CorpusReport::to_json() const {
  nlohmann::ordered_json j;
  j["lines"] = lines;
  j["labeled"] = labeled;
  j["malformed"] = malformed;
  j["per_label"] = {{"informational", per_label[0]},
                    {"navigational", per_label[1]},
                    {"transactional", per_label[2]}};
  j["defaulted"] = defaulted;
  j["workers"] = workers;
  j["seconds"] = seconds;
  j["queries_per_second"] = queries_per_second();
  return j;
}

CorpusReport label_corpus_serial(std::istream& in, std::ostream& out, const FunctionSet& fs,
                                 const PosTagger& tagger, const CorpusOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  CorpusReport rep;
  rep.workers = 1;
  for_each_line(in, [&](std::size_t n, std::string_view line) {
    account(rep, n, label_line(line, fs, tagger, opts), out);
  });
  rep.seconds = since(t0);
  return rep;
}

CorpusReport label_corpus(std::istream& in, std::ostream& out, const FunctionSet& fs,
                          const PosTagger& tagger, const CorpusOptions& opts) {
  if (opts.workers < 1) throw DataError("workers must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  CorpusReport rep;
  rep.workers = opts.workers;

  const std::size_t chunk = std::max<std::size_t>(opts.chunk_lines, 1);
  std::vector<std::string> lines;
  std::vector<std::size_t> numbers;
  std::vector<LineOutcome> results;
  lines.reserve(chunk);
  numbers.reserve(chunk);

  auto flush = [&] {
    results.assign(lines.size(), {});
    const auto n = static_cast<std::ptrdiff_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(opts.workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) results[i] = label_line(lines[i], fs, tagger, opts);
    for (std::size_t i = 0; i < lines.size(); ++i) account(rep, numbers[i], results[i], out);
    lines.clear();
    numbers.clear();
  };

  for_each_line(in, [&](std::size_t n, std::string_view line) {
    lines.emplace_back(line);
    numbers.push_back(n);
    if (lines.size() == chunk) flush();
  });
  if (!lines.empty()) flush();
  rep.seconds = since(t0);
  return rep;
}

std::vector<WeakLabel> label_all_serial(std::span<const Query> queries, const FunctionSet& fs,
                                        const PosTagger& tagger) {
  std::vector<WeakLabel> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(label(q, fs, tagger));
  return out;
}

std::vector<WeakLabel> label_all(std::span<const Query> queries, const FunctionSet& fs,
                                 const PosTagger& tagger, int workers) {
  if (workers < 1) throw DataError("workers must be >= 1");
  std::vector<WeakLabel> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = label(queries[i], fs, tagger);
  return out;
}

}  // namespace qintent
