#include "qintent/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "CLI11.hpp"
#include "cli_commands.hpp"
#include "qintent/errors.hpp"
#include "qintent/manifest.hpp"

namespace qintent::cli {

namespace {

void log_to_stderr() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("qintent");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

int dispatch(int argc, const char* const* argv) {
  log_to_stderr();
  CLI::App app{"Short-query intent classification toolkit", "qintent"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  LabelArgs label;
  auto* c_label = app.add_subcommand("label", "Weak-supervision labeling of a query corpus");
  c_label->add_option("--input", label.input, "TSV or JSONL queries")->required();
  c_label->add_option("--functions", label.functions, "Labeling-function config")->capture_default_str();
  c_label->add_option("--output", label.output, "JSONL weak labels")->required();
  c_label->add_option("--workers", label.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  c_label->add_option("--format", label.format, "auto, jsonl or tsv")
      ->check(CLI::IsMember({"auto", "jsonl", "tsv"}))->capture_default_str();
  c_label->add_option("--query-column", label.query_column, "TSV query column (0-based)")->capture_default_str();
  c_label->add_option("--id-column", label.id_column, "TSV id column, -1 for none")->capture_default_str();
  c_label->add_flag("--no-votes", label.no_votes, "Omit per-function votes from the output");

  ClassifyArgs classify;
  auto* c_cls = app.add_subcommand("classify-llm", "Classify queries with a hosted chat model");
  c_cls->add_option("--scenario", classify.scenario, "definitions, definitions-keywords, few-shot, clue-reasoning")
      ->required()->check(CLI::IsMember({"definitions", "definitions-keywords", "few-shot", "clue-reasoning"}));
  c_cls->add_option("--endpoint", classify.endpoint, "Endpoint config JSON")->required();
  c_cls->add_option("--input", classify.input, "JSONL queries")->required();
  c_cls->add_option("--output", classify.output, "JSONL predictions")->required();
  c_cls->add_option("--prompts", classify.prompts, "Prompt asset directory");
  c_cls->add_option("--report", classify.report, "Also write the run report here");

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Stratified random sample, equal count per class");
  c_sample->add_option("--input", sample.input, "Labeled JSONL corpus")->required();
  c_sample->add_option("--per-class", sample.per_class, "Queries per class")->required()->check(CLI::PositiveNumber);
  c_sample->add_option("--seed", sample.seed, "Random seed");
  c_sample->add_option("--max-tokens", sample.max_tokens, "Truncate queries to this many tokens")->capture_default_str();
  c_sample->add_option("--out", sample.out, "Output JSONL")->required();

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Stratified train/validation split");
  c_split->add_option("--input", split.input, "Labeled JSONL")->required();
  c_split->add_option("--ratio", split.ratio, "Training fraction")->capture_default_str();
  c_split->add_option("--seed", split.seed, "Random seed");
  c_split->add_option("--format", split.format, "records or finetune")
      ->check(CLI::IsMember({"records", "finetune"}))->capture_default_str();
  c_split->add_option("--out", split.out, "Output directory (train.jsonl, validation.jsonl)")->required();

  SelectHcArgs hc;
  auto* c_hc = app.add_subcommand("select-hc", "Pick high-confidence predictions per class");
  c_hc->add_option("--preds", hc.preds, "Prediction JSONL with confidences")->required();
  c_hc->add_option("--threshold", hc.threshold, "Minimum confidence, e.g. 0.88 0.90 0.95 0.97")->required();
  c_hc->add_option("--per-class", hc.per_class, "Queries per class")->capture_default_str()->check(CLI::PositiveNumber);
  c_hc->add_option("--exclude", hc.exclude, "JSONL files whose ids must not be selected");
  c_hc->add_option("--seed", hc.seed, "Random seed");
  c_hc->add_option("--out", hc.out, "Output JSONL")->required();

  AssembleArgs as;
  auto* c_as = app.add_subcommand("assemble", "Union of a random sample and a high-confidence selection");
  c_as->add_option("--random", as.random, "Random sample JSONL")->required();
  c_as->add_option("--hc", as.hc, "High-confidence JSONL")->required();
  c_as->add_option("--threshold", as.threshold, "Threshold the selection was made with");
  c_as->add_option("--seed", as.seed, "Shuffle seed");
  c_as->add_option("--format", as.format, "records or finetune")
      ->check(CLI::IsMember({"records", "finetune"}))->capture_default_str();
  c_as->add_option("--out", as.out, "Output JSONL")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Score systems against gold and test differences");
  c_eval->add_option("--gold", ev.gold, "Gold JSONL")->required();
  c_eval->add_option("--preds", ev.preds, "Prediction JSONL files")->required();
  c_eval->add_option("--names", ev.names, "System names (default: file stems)");
  c_eval->add_option("--baseline", ev.baseline, "Baseline system name (default: first)");
  c_eval->add_option("--iterations", ev.iterations, "Permutation iterations")->capture_default_str()->check(CLI::PositiveNumber);
  c_eval->add_option("--alpha", ev.alpha, "Family-wise significance level")->capture_default_str();
  c_eval->add_option("--family-size", ev.family_size, "Bonferroni m (default: challengers x 3)");
  c_eval->add_option("--seed", ev.seed, "Permutation seed");
  c_eval->add_option("--workers", ev.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  c_eval->add_option("--markdown", ev.markdown, "Also write a markdown table");
  c_eval->add_option("--out", ev.out, "Report JSON")->required();

  HybridArgs hy;
  auto* c_hy = app.add_subcommand("hybrid", "Combine LLM and weak-supervision predictions");
  c_hy->add_option("--llm-preds", hy.llm_preds, "LLM prediction JSONL")->required();
  c_hy->add_option("--ws-preds", hy.ws_preds, "Weak label JSONL (with votes)")->required();
  c_hy->add_option("--policy", hy.policy, "Policy JSON")->required();
  c_hy->add_option("--out", hy.out, "Output JSONL")->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time serial and parallel corpus labeling");
  c_bench->add_option("--queries", bench.queries, "Synthetic queries")->capture_default_str();
  c_bench->add_option("--workers", bench.workers, "Parallel workers (0: all)")->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "Generator seed");
  c_bench->add_option("--out", bench.out, "Optional JSON result");

  std::string run_config;
  auto* c_run = app.add_subcommand("run", "Execute a multi-stage run config");
  c_run->add_option("config", run_config, "Run config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kExitUsage;
  }

  try {
    if (c_label->parsed()) return run_label(label);
    if (c_cls->parsed()) return run_classify(classify);
    if (c_sample->parsed()) return run_sample(sample);
    if (c_split->parsed()) return run_split(split);
    if (c_hc->parsed()) return run_select_hc(hc);
    if (c_as->parsed()) return run_assemble(as);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_hy->parsed()) return run_hybrid(hy);
    if (c_bench->parsed()) return run_bench(bench);
    if (c_run->parsed()) return run_pipeline(run_config);
  } catch (const RemoteError& e) {
    spdlog::error("{}", e.what());
    return kExitRemote;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace qintent::cli
