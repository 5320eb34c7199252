#include "cli_commands.hpp"

#include <omp.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <unordered_map>

#include "qintent/cli.hpp"
#include "qintent/curation.hpp"
#include "qintent/evaluation.hpp"
#include "qintent/hybrid.hpp"
#include "qintent/labeling.hpp"
#include "qintent/llm_client.hpp"
#include "qintent/manifest.hpp"
#include "qintent/records.hpp"
#include "qintent/synthetic.hpp"

namespace qintent::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint64_t resolve_seed(std::optional<std::uint64_t>& seed, RunManifest& m, const char* name) {
  if (!seed) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    spdlog::info("no --{} given, using {}", name, *seed);
  }
  m.seeds[name] = *seed;
  return *seed;
}

std::vector<Example> read_examples(const fs::path& p) {
  std::vector<Example> out;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  for_each_line(in, [&](std::size_t n, std::string_view line) {
    try {
      out.push_back(example_from_record(parse_jsonl_record(line)));
    } catch (const DataError& e) {
      throw DataError(p.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  });
  return out;
}

void write_examples(const fs::path& p, std::span<const Example> examples, bool finetune) {
  std::vector<Record> records;
  records.reserve(examples.size());
  for (const auto& e : examples) records.push_back(finetune ? to_finetune_record(e) : to_record(e));
  write_jsonl(p, records);
}

ordered_json class_counts(const PerClass& pc) {
  ordered_json j = ordered_json::object();
  for (auto l : kAllLabels) j[std::string(to_string(l))] = pc[index_of(l)].size();
  return j;
}

ordered_json class_counts(std::span<const Example> xs) {
  std::array<std::size_t, kNumLabels> n{};
  for (const auto& e : xs) ++n[index_of(e.label)];
  ordered_json j = ordered_json::object();
  for (auto l : kAllLabels) j[std::string(to_string(l))] = n[index_of(l)];
  return j;
}

void finish(RunManifest& m, const fs::path& out, const Stopwatch& sw) {
  m.duration_seconds = sw.seconds();
  m.write(manifest_path_for(out));
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

int run_label(const LabelArgs& a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "label";

  const auto funcs = FunctionSet::load(a.functions);
  CorpusOptions opts;
  opts.format = a.format == "auto" ? format_for_path(a.input)
                : a.format == "tsv" ? InputFormat::Tsv
                                    : InputFormat::Jsonl;
  opts.layout.query_column = a.query_column;
  opts.layout.id_column =
      a.id_column < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(a.id_column));
  opts.workers = a.workers;
  opts.with_votes = !a.no_votes;

  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw DataError("cannot read " + a.input);
  ensure_parent(a.output);
  CorpusReport report;
  {
    std::ofstream out(a.output, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + a.output);
    report = label_corpus(in, out, funcs, PosTagger{}, opts);
    if (!out) throw DataError("write failed for " + a.output);
  }
  if (report.labeled == 0) throw DataError("no query in " + a.input + " could be labeled");

  spdlog::info("labeled {} of {} lines ({} malformed, {} defaulted) in {:.2f}s, {:.0f} q/s",
               report.labeled, report.lines, report.malformed, report.defaulted, report.seconds,
               report.queries_per_second());
  m.config = {{"functions", a.functions},
              {"format", opts.format == InputFormat::Tsv ? "tsv" : "jsonl"},
              {"workers", a.workers},
              {"with_votes", opts.with_votes},
              {"function_set", funcs.to_json()}};
  m.add_input(a.input);
  m.add_output(a.output);
  m.report = report.to_json();
  finish(m, a.output, sw);
  return kExitOk;
}

int run_classify(const ClassifyArgs& a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "classify-llm";

  const auto scenario = parse_scenario(a.scenario);
  const auto endpoint = ModelEndpoint::load(a.endpoint);
  const auto assets = a.prompts.empty() ? PromptAssets::builtin() : PromptAssets::load(a.prompts);

  std::vector<Query> queries;
  for (const auto& r : read_jsonl(a.input)) queries.push_back(to_query(r));

  LlmClient client(endpoint);
  auto result = classify_batch(client, scenario, queries, assets);

  ensure_parent(a.output);
  {
    std::ofstream out(a.output, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + a.output);
    for (const auto& item : result.items) out << to_json(item).dump() << '\n';
  }
  const auto report = result.report.to_json();
  if (!a.report.empty()) {
    ensure_parent(a.report);
    std::ofstream r(a.report, std::ios::binary | std::ios::trunc);
    if (!r) throw DataError("cannot write " + a.report);
    r << report.dump(2) << '\n';
  }
  spdlog::info("{}: {} parsed, {} out of vocabulary, {} failed", a.scenario, result.report.parsed,
               result.report.oov_count, result.report.error_count);

  m.config = {{"scenario", a.scenario},
              {"endpoint", endpoint.to_json()},
              {"prompts", a.prompts.empty() ? "builtin" : a.prompts}};
  m.seeds["jitter_seed"] = endpoint.jitter_seed;
  m.add_input(a.input);
  m.add_input(a.endpoint);
  m.add_output(a.output);
  m.report = report;
  finish(m, a.output, sw);
  if (result.report.total > 0 && result.report.error_count == result.report.total)
    return kExitRemote;
  return kExitOk;
}

int run_sample(SampleArgs a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "sample";
  const auto seed = resolve_seed(a.seed, m, "seed");

  StratifiedReservoir reservoir(a.per_class, seed);
  {
    std::ifstream in(a.input, std::ios::binary);
    if (!in) throw DataError("cannot read " + a.input);
    for_each_line(in, [&](std::size_t n, std::string_view line) {
      try {
        reservoir.offer(example_from_record(parse_jsonl_record(line)));
      } catch (const DataError& e) {
        throw DataError(a.input + ":" + std::to_string(n) + ": " + e.what());
      }
    });
  }
  ordered_json seen = ordered_json::object();
  for (auto l : kAllLabels) seen[std::string(to_string(l))] = reservoir.seen(l);
  const auto duplicates = reservoir.duplicates();
  auto sample = std::move(reservoir).finish(a.input);

  std::size_t truncated = 0;
  for (auto& cls : sample.per_class)
    for (auto& e : cls) {
      auto t = truncate_tokens(e.query, a.max_tokens);
      if (t.truncated) {
        ++truncated;
        e.query = std::move(t.query);
      }
    }

  ensure_parent(a.out);
  write_examples(a.out, sample.flatten(), false);
  spdlog::info("sampled {} queries ({} truncated)", sample.total(), truncated);

  m.config = {{"per_class", a.per_class}, {"max_tokens", a.max_tokens}};
  m.add_input(a.input);
  m.add_output(a.out);
  m.report = {{"per_class", class_counts(sample.per_class)},
              {"seen", seen},
              {"duplicates_skipped", duplicates},
              {"truncated", truncated}};
  finish(m, a.out, sw);
  return kExitOk;
}

int run_split(SplitArgs a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "split";
  const auto seed = resolve_seed(a.seed, m, "seed");
  if (!(a.ratio > 0.0 && a.ratio < 1.0)) throw DataError("--ratio must be inside (0, 1)");

  const auto examples = read_examples(a.input);
  const auto split = split_train_val(examples, a.ratio, seed);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  const bool finetune = a.format == "finetune";
  write_examples(dir / "train.jsonl", split.train, finetune);
  write_examples(dir / "validation.jsonl", split.validation, finetune);
  spdlog::info("train {} / validation {}", split.train.size(), split.validation.size());

  m.config = {{"ratio", a.ratio}, {"format", a.format}};
  m.add_input(a.input);
  m.add_output(dir / "train.jsonl");
  m.add_output(dir / "validation.jsonl");
  m.report = {{"train", split.train.size()},
              {"validation", split.validation.size()},
              {"train_per_class", class_counts(split.train)},
              {"validation_per_class", class_counts(split.validation)}};
  finish(m, dir, sw);
  return kExitOk;
}

int run_select_hc(SelectHcArgs a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "select-hc";
  const auto seed = resolve_seed(a.seed, m, "seed");
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw DataError("--threshold must be in [0, 1]");

  StringSet exclude;
  for (const auto& path : a.exclude) {
    for (const auto& r : read_jsonl(path)) exclude.insert(to_query(r).id());
    m.add_input(path);
  }
  const auto preds = read_examples(a.preds);
  const auto sel = select_high_confidence(preds, a.threshold, a.per_class, seed, exclude);

  ensure_parent(a.out);
  write_examples(a.out, sel.flatten(), false);
  ordered_json eligible = ordered_json::object();
  for (auto l : kAllLabels) eligible[std::string(to_string(l))] = sel.eligible[index_of(l)];
  spdlog::info("selected {} per class at threshold {}", a.per_class, a.threshold);

  m.config = {{"threshold", a.threshold}, {"per_class", a.per_class}, {"exclude", a.exclude}};
  m.add_input(a.preds);
  m.add_output(a.out);
  m.report = {{"per_class", class_counts(sel.per_class)},
              {"eligible", eligible},
              {"excluded", sel.excluded}};
  finish(m, a.out, sw);
  return kExitOk;
}

int run_assemble(AssembleArgs a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "assemble";
  const auto seed = resolve_seed(a.seed, m, "seed");

  auto random_part = read_examples(a.random);
  auto hc = read_examples(a.hc);
  PerClass hc_part;
  for (auto& e : hc) hc_part[index_of(e.label)].push_back(std::move(e));
  const double threshold = a.threshold.value_or(0.0);

  auto set = assemble_augmented(group_by_label(random_part, a.random), std::move(hc_part), threshold, seed);

  ensure_parent(a.out);
  write_examples(a.out, set.records, a.format == "finetune");
  spdlog::info("assembled {} examples", set.records.size());

  double min_hc = 1.0;
  for (const auto& cls : set.high_conf_part)
    for (const auto& e : cls) min_hc = std::min(min_hc, e.confidence);

  m.config = {{"threshold", threshold}, {"format", a.format}};
  m.add_input(a.random);
  m.add_input(a.hc);
  m.add_output(a.out);
  m.report = {{"total", set.records.size()},
              {"random_part", set.random_part.total()},
              {"high_confidence_part", class_counts(set.high_conf_part)},
              {"min_high_confidence", min_hc},
              {"per_class", class_counts(set.records)}};
  finish(m, a.out, sw);
  return kExitOk;
}

int run_eval(EvalArgs a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "eval";
  const auto seed = resolve_seed(a.seed, m, "seed");
  if (!a.names.empty() && a.names.size() != a.preds.size())
    throw DataError("--names must list one name per --preds file");
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw DataError("--alpha must be inside (0, 1)");

  const auto gold = to_gold_set(read_jsonl(a.gold));
  if (gold.empty()) throw EmptyGold();
  const auto labels = gold_labels(gold);
  m.add_input(a.gold);

  std::vector<SystemPredictions> systems;
  ordered_json unmatched = ordered_json::object();
  for (std::size_t i = 0; i < a.preds.size(); ++i) {
    const auto name = a.names.empty() ? fs::path(a.preds[i]).stem().string() : a.names[i];
    for (const auto& s : systems)
      if (s.name == name) throw DataError("two systems are named \"" + name + "\"");
    std::size_t missing = 0;
    systems.push_back({name, align_records(read_jsonl(a.preds[i]), gold, &missing)});
    unmatched[name] = missing;
    if (missing > 0) spdlog::warn("{}: {} gold queries have no prediction", name, missing);
    m.add_input(a.preds[i]);
  }

  std::size_t base = 0;
  if (!a.baseline.empty()) {
    base = systems.size();
    for (std::size_t i = 0; i < systems.size(); ++i)
      if (systems[i].name == a.baseline) base = i;
    if (base == systems.size()) throw DataError("baseline \"" + a.baseline + "\" is not among the systems");
  }
  std::vector<SystemPredictions> challengers;
  for (std::size_t i = 0; i < systems.size(); ++i)
    if (i != base) challengers.push_back(systems[i]);

  CompareOptions opts;
  opts.iterations = a.iterations;
  opts.seed = seed;
  opts.alpha = a.alpha;
  opts.family_size = a.family_size;
  opts.workers = a.workers;
  const auto table = compare_report(systems[base], challengers, labels, opts);

  ordered_json report = {{"gold", a.gold}, {"n", gold.size()}, {"unmatched", unmatched}};
  report["comparison"] = table.to_json();
  ensure_parent(a.out);
  {
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + a.out);
    out << report.dump(2) << '\n';
  }
  m.add_output(a.out);
  if (!a.markdown.empty()) {
    ensure_parent(a.markdown);
    std::ofstream md(a.markdown, std::ios::binary | std::ios::trunc);
    if (!md) throw DataError("cannot write " + a.markdown);
    md << table.to_markdown();
    md.close();
    m.add_output(a.markdown);
  }
  std::cerr << table.to_markdown();

  m.config = {{"iterations", a.iterations},
              {"alpha", a.alpha},
              {"family_size", table.family_size},
              {"baseline", systems[base].name}};
  m.report = {{"n", gold.size()}, {"systems", systems.size()}};
  finish(m, a.out, sw);
  return kExitOk;
}

int run_hybrid(const HybridArgs& a) {
  Stopwatch sw;
  RunManifest m;
  m.subcommand = "hybrid";

  ordered_json pj;
  {
    std::ifstream in(a.policy, std::ios::binary);
    if (!in) throw DataError("cannot read " + a.policy);
    try {
      pj = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidPolicy(a.policy + ": " + e.what());
    }
  }
  const auto policy = HybridPolicy::from_json(pj);

  std::unordered_map<std::string, std::optional<Prediction>> llm;
  for (const auto& r : read_jsonl(a.llm_preds)) {
    const auto id = to_query(r).id();
    std::optional<Prediction> p;
    if (r.label) {
      try {
        p = to_prediction(r, Provenance::LlmIcl);
      } catch (const OutOfVocabularyLabel&) {
      }
    }
    if (!llm.emplace(id, std::move(p)).second) throw DuplicatePrediction(id);
  }

  std::vector<Record> out;
  std::size_t missing = 0;
  for (const auto& r : read_jsonl(a.ws_preds)) {
    const auto q = to_query(r);
    const auto ws = weak_label_from_record(r);
    std::optional<Prediction> lp;
    if (auto it = llm.find(q.id()); it != llm.end())
      lp = it->second;
    else
      ++missing;
    out.push_back(to_record(hybrid_classify(q, lp, ws, policy), q.text()));
  }
  if (missing > 0) spdlog::warn("{} weak-labeled queries have no LLM prediction", missing);

  ensure_parent(a.out);
  write_jsonl(a.out, out);
  m.config = {{"policy", policy.to_json()}};
  m.add_input(a.llm_preds);
  m.add_input(a.ws_preds);
  m.add_input(a.policy);
  m.add_output(a.out);
  m.report = {{"total", out.size()}, {"missing_llm", missing}};
  finish(m, a.out, sw);
  return kExitOk;
}

int run_bench(BenchArgs a) {
  RunManifest m;
  const auto seed = resolve_seed(a.seed, m, "seed");
  const int workers = a.workers > 0 ? a.workers : omp_get_max_threads();

  std::vector<Query> queries;
  queries.reserve(a.queries);
  for (auto& s : synthetic_queries(a.queries, seed)) queries.push_back(Query::make(s.text, s.id));
  const auto& funcs = FunctionSet::builtin();
  const PosTagger tagger;

  Stopwatch t1;
  const auto serial = label_all_serial(queries, funcs, tagger);
  const double serial_s = t1.seconds();
  Stopwatch t2;
  const auto parallel = label_all(queries, funcs, tagger, workers);
  const double parallel_s = t2.seconds();

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].label == parallel[i].label && serial[i].confidence == parallel[i].confidence &&
                serial[i].votes == parallel[i].votes;

  ordered_json j = {{"queries", a.queries},
                    {"seed", seed},
                    {"workers", workers},
                    {"serial_seconds", serial_s},
                    {"parallel_seconds", parallel_s},
                    {"serial_qps", serial_s > 0 ? a.queries / serial_s : 0.0},
                    {"parallel_qps", parallel_s > 0 ? a.queries / parallel_s : 0.0},
                    {"speedup", parallel_s > 0 ? serial_s / parallel_s : 0.0},
                    {"identical", identical}};
  std::cout << j.dump(2) << '\n';
  if (!a.out.empty()) {
    ensure_parent(a.out);
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + a.out);
    out << j.dump(2) << '\n';
  }
  if (!identical) throw DataError("parallel labels differ from the serial reference");
  return kExitOk;
}

int run_pipeline(const std::string& config_path) {
  ordered_json cfg;
  {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw DataError("cannot read " + config_path);
    try {
      cfg = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(config_path + ": " + e.what());
    }
  }
  if (!cfg.contains("stages") || !cfg["stages"].is_array())
    throw DataError(config_path + ": expected a \"stages\" array");

  std::size_t n = 0;
  for (const auto& stage : cfg["stages"]) {
    ++n;
    if (!stage.contains("command") || !stage["command"].is_string())
      throw DataError("stage " + std::to_string(n) + " has no \"command\"");
    const auto command = stage["command"].get<std::string>();
    if (command == "run") throw DataError("stage " + std::to_string(n) + ": nested runs are not allowed");

    std::vector<std::string> argv{"qintent", command};
    const auto args = stage.value("args", ordered_json::object());
    if (!args.is_object()) throw DataError("stage " + std::to_string(n) + ": \"args\" must be an object");
    for (auto it = args.begin(); it != args.end(); ++it) {
      const auto flag = "--" + it.key();
      const auto& v = it.value();
      if (v.is_boolean()) {
        if (v.get<bool>()) argv.push_back(flag);
      } else if (v.is_array()) {
        argv.push_back(flag);
        for (const auto& x : v) argv.push_back(x.is_string() ? x.get<std::string>() : x.dump());
      } else if (!v.is_null()) {
        argv.push_back(flag);
        argv.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    spdlog::info("stage {}: {}", n, command);
    if (const int rc = dispatch(argv); rc != kExitOk) {
      spdlog::error("stage {} ({}) failed with exit code {}", n, command, rc);
      return rc;
    }
  }
  return kExitOk;
}

}  // namespace qintent::cli
