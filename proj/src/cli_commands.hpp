#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qintent::cli {

struct LabelArgs {
  std::string input;
  std::string functions = "builtin:functions.json";
  std::string output;
  std::string format = "auto";
  int workers = 1;
  std::size_t query_column = 1;
  int id_column = 0;  // -1: none
  bool no_votes = false;
};

struct ClassifyArgs {
  std::string scenario;
  std::string endpoint;
  std::string input;
  std::string output;
  std::string prompts;  // directory; empty for the builtin assets
  std::string report;
};

struct SampleArgs {
  std::string input;
  std::string out;
  std::size_t per_class = 0;
  std::optional<std::uint64_t> seed;
  std::size_t max_tokens = 32;
};

struct SplitArgs {
  std::string input;
  std::string out;
  double ratio = 0.8;
  std::optional<std::uint64_t> seed;
  std::string format = "records";
};

struct SelectHcArgs {
  std::string preds;
  std::vector<std::string> exclude;
  double threshold = 0.0;
  std::size_t per_class = 5000;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct AssembleArgs {
  std::string random;
  std::string hc;
  std::string out;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::string format = "records";
};

struct EvalArgs {
  std::string gold;
  std::vector<std::string> preds;
  std::vector<std::string> names;
  std::string baseline;
  int iterations = 5000;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string markdown;
  std::size_t family_size = 0;
  int workers = 1;
};

struct HybridArgs {
  std::string llm_preds;
  std::string ws_preds;
  std::string policy;
  std::string out;
};

struct BenchArgs {
  std::size_t queries = 60000;
  int workers = 0;  // 0: all available threads
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_label(const LabelArgs& a);
int run_classify(const ClassifyArgs& a);
int run_sample(SampleArgs a);
int run_split(SplitArgs a);
int run_select_hc(SelectHcArgs a);
int run_assemble(AssembleArgs a);
int run_eval(EvalArgs a);
int run_hybrid(const HybridArgs& a);
int run_bench(BenchArgs a);
int run_pipeline(const std::string& config_path);

}  // namespace qintent::cli
