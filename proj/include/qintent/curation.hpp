#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qintent/query.hpp"
#include "qintent/records.hpp"
#include "qintent/string_set.hpp"

namespace qintent {

class InsufficientClass : public DataError {
 public:
  InsufficientClass(IntentLabel label, std::size_t have, std::size_t need)
      : DataError("class " + std::string(to_string(label)) + " has " + std::to_string(have) +
                  " eligible queries, need " + std::to_string(need)),
        label_(label), have_(have), need_(need) {}
  IntentLabel label() const noexcept { return label_; }
  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }

 private:
  IntentLabel label_;
  std::size_t have_, need_;
};

class OverlapDetected : public DataError {
 public:
  explicit OverlapDetected(const std::string& id)
      : DataError("query id \"" + id + "\" appears in both parts"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// A labeled query as it moves through curation.
struct Example {
  Query query;
  IntentLabel label;
  double confidence = 1.0;
  Provenance provenance = Provenance::Weak;

  friend bool operator==(const Example&, const Example&) = default;
};

Example example_from_record(const Record& r);
Record to_record(const Example& e);
/// Fine-tuning export: exactly {"query", "label"}.
Record to_finetune_record(const Example& e);

using PerClass = std::array<std::vector<Example>, kNumLabels>;

struct StratifiedSample {
  PerClass per_class;
  std::uint64_t seed = 0;
  std::string source;

  std::size_t total() const noexcept;
  /// Classes concatenated in label order.
  std::vector<Example> flatten() const;
};

/// Groups examples by label without sampling (for re-reading a sample file).
StratifiedSample group_by_label(std::span<const Example> examples, std::string source = {});

/// Single-pass per-class reservoir sampling (Algorithm R). Each class draws
/// from its own stream derived from the seed. Repeated ids are skipped.
class StratifiedReservoir {
 public:
  StratifiedReservoir(std::size_t n_per_class, std::uint64_t seed);

  void offer(const Example& e);
  /// Throws InsufficientClass if any class saw fewer than n_per_class.
  StratifiedSample finish(std::string source = {}) &&;

  std::size_t seen(IntentLabel l) const noexcept { return seen_[index_of(l)]; }
  std::size_t duplicates() const noexcept { return duplicates_; }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::array<std::mt19937_64, kNumLabels> rngs_;
  std::array<std::size_t, kNumLabels> seen_{};
  PerClass slots_;
  StringSet ids_;
  std::size_t duplicates_ = 0;
};

StratifiedSample stratified_sample(std::span<const Example> corpus, std::size_t n_per_class,
                                   std::uint64_t seed, std::string source = {});

// ---------------------------------------------------------------------------

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const std::string> tokens) const = 0;
};

class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const std::string> tokens) const override;
};

struct Truncation {
  Query query;
  bool truncated = false;
  std::size_t original_tokens = 0;
};

inline constexpr std::size_t kMaxQueryTokens = 32;

/// Keeps the first `max_tokens` tokens. The id is preserved.
Truncation truncate_tokens(const Query& q, std::size_t max_tokens = kMaxQueryTokens,
                           const Tokenizer& tok = WhitespaceTokenizer{});

// ---------------------------------------------------------------------------

struct TrainValSplit {
  std::vector<Example> train;
  std::vector<Example> validation;
};

/// Per-class split: round(ratio * n_c) of each class go to train. Both
/// outputs are shuffled with streams derived from `seed`.
TrainValSplit split_train_val(std::span<const Example> examples, double ratio, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct HighConfidenceSelection {
  PerClass per_class;
  double threshold = 0.0;
  std::array<std::size_t, kNumLabels> eligible{};  // passed filter and exclusion
  std::size_t excluded = 0;                        // dropped because of the exclusion set

  std::vector<Example> flatten() const;
};

/// Keeps predictions with confidence >= threshold whose id is not in
/// `exclude`, then draws n_per_class per class by seeded reservoir.
HighConfidenceSelection select_high_confidence(std::span<const Example> preds, double threshold,
                                               std::size_t n_per_class, std::uint64_t seed,
                                               const StringSet& exclude);

struct AugmentedSet {
  StratifiedSample random_part;
  PerClass high_conf_part;
  double threshold = 0.0;
  std::vector<Example> records;  // union of both parts, shuffled
};

/// Throws OverlapDetected if an id appears twice across or within parts,
/// DataError if a high-confidence example is below `threshold`.
AugmentedSet assemble_augmented(StratifiedSample random, PerClass high_conf, double threshold,
                                std::uint64_t seed);

/// Fisher-Yates with uniform_below.
void seeded_shuffle(std::vector<Example>& v, std::uint64_t seed);

}  // namespace qintent
