#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qintent/pos_tagger.hpp"
#include "qintent/query.hpp"
#include "qintent/records.hpp"
#include "qintent/string_set.hpp"

namespace qintent {

/// One labeling function's opinion on one query. An empty label is Abstain.
struct LabelVote {
  std::optional<IntentLabel> label;
  std::string source;

  bool abstained() const noexcept { return !label.has_value(); }
  friend bool operator==(const LabelVote&, const LabelVote&) = default;
};

enum class LfKind : std::uint8_t { KeywordSet, Pattern, PosRule, LengthHeuristic };

std::string_view to_string(LfKind k) noexcept;

/// Where a PosRule looks for its tag.
enum class TokenPosition : std::uint8_t { First, Last, Any };

class LabelingFunction {
 public:
  /// Keywords are normalized; multiword keywords match contiguous tokens.
  static LabelingFunction keyword_set(std::string name, IntentLabel target,
                                      std::vector<std::string> keywords);
  /// ECMAScript regex searched in the normalized text. Throws DataError if
  /// the pattern does not compile.
  static LabelingFunction pattern(std::string name, IntentLabel target, std::string regex);
  static LabelingFunction pos_rule(std::string name, IntentLabel target, PosTag tag,
                                   TokenPosition position = TokenPosition::First);
  /// Fires when the query has at least `min_tokens` tokens and
  /// `exclude_regex` (if any) does not match.
  static LabelingFunction length_heuristic(std::string name, IntentLabel target,
                                           std::size_t min_tokens,
                                           std::optional<std::string> exclude_regex = std::nullopt);

  static LabelingFunction from_json(const nlohmann::ordered_json& j);
  nlohmann::ordered_json to_json() const;

  const std::string& name() const noexcept { return name_; }
  LfKind kind() const noexcept { return kind_; }
  IntentLabel target() const noexcept { return target_; }

  /// `tokens` must come from tagging `q.text()`.
  LabelVote apply(const Query& q, std::span<const TaggedToken> tokens) const;
  /// The same decision without building a LabelVote.
  bool fires(std::string_view text, std::span<const TaggedToken> tokens) const;

 private:
  struct Keywords {
    std::vector<std::string> listed;  // as configured, for round-tripping
    StringSet single;
    std::vector<std::vector<std::string>> phrases;
  };
  struct Pattern {
    std::string source;
    std::shared_ptr<const std::regex> re;
  };
  struct PosRule {
    PosTag tag;
    TokenPosition position;
  };
  struct Length {
    std::size_t min_tokens;
    std::optional<std::string> exclude_source;
    std::shared_ptr<const std::regex> exclude;
  };

  LabelingFunction(std::string name, LfKind kind, IntentLabel target,
                   std::variant<Keywords, Pattern, PosRule, Length> params)
      : name_(std::move(name)), kind_(kind), target_(target), params_(std::move(params)) {}

  std::string name_;
  LfKind kind_;
  IntentLabel target_;
  std::variant<Keywords, Pattern, PosRule, Length> params_;
};

/// An immutable-after-load collection of labeling functions plus the
/// all-abstain fallback.
class FunctionSet {
 public:
  static constexpr double kDefaultConfidence = 0.34;

  FunctionSet() = default;

  /// The set shipped in data/functions.json.
  static const FunctionSet& builtin();
  static FunctionSet from_json(const nlohmann::ordered_json& j);
  /// "builtin:functions.json" loads the embedded copy.
  static FunctionSet load(const std::string& path);
  nlohmann::ordered_json to_json() const;

  /// Throws DataError when the name is already taken.
  void add(LabelingFunction lf);

  std::span<const LabelingFunction> functions() const noexcept { return functions_; }
  const LabelingFunction* find(std::string_view name) const noexcept;
  std::size_t size() const noexcept { return functions_.size(); }

  IntentLabel default_label() const noexcept { return default_label_; }
  double default_confidence() const noexcept { return default_confidence_; }
  void set_default(IntentLabel label, double confidence);

 private:
  std::vector<LabelingFunction> functions_;
  IntentLabel default_label_ = IntentLabel::Informational;
  double default_confidence_ = kDefaultConfidence;
};

/// Majority-vote outcome for one query.
struct WeakLabel {
  IntentLabel label = IntentLabel::Informational;
  double confidence = 0.0;
  std::vector<LabelVote> votes;  // in function-set order
  std::array<std::uint32_t, kNumLabels> tally{};
  bool defaulted = false;   // every function abstained
  bool tie_broken = false;  // several labels shared the top count

  std::uint32_t non_abstain() const noexcept { return tally[0] + tally[1] + tally[2]; }
  /// tally / non_abstain(); all zero when defaulted.
  std::array<double, kNumLabels> vote_fractions() const noexcept;
};

/// Fixed tie-break order: Navigational, then Transactional, then Informational.
inline constexpr std::array<IntentLabel, kNumLabels> kTiePriority = {
    IntentLabel::Navigational, IntentLabel::Transactional, IntentLabel::Informational};

/// Majority vote over the tally; the tie-break never depends on function order.
WeakLabel aggregate(std::vector<LabelVote> votes, const FunctionSet& fs);

WeakLabel label(const Query& q, const FunctionSet& fs, const PosTagger& tagger);
WeakLabel label(const Query& q, const FunctionSet& fs);

/// JSONL form of a weak label: the shared record schema plus
/// "defaulted", "tie_broken" and (optionally) "votes".
Record to_record(const Query& q, const WeakLabel& w, bool with_votes = true);
/// Inverse of to_record; requires the "votes" object.
WeakLabel weak_label_from_record(const Record& r);
Prediction to_prediction(const Query& q, const WeakLabel& w);

// ---------------------------------------------------------------------------
// Corpus labeling

struct CorpusOptions {
  InputFormat format = InputFormat::Jsonl;
  TsvLayout layout{};
  int workers = 1;
  std::size_t chunk_lines = 1 << 14;
  bool with_votes = true;
};

struct CorpusReport {
  std::size_t lines = 0;
  std::size_t labeled = 0;
  std::size_t malformed = 0;
  std::array<std::size_t, kNumLabels> per_label{};
  std::size_t defaulted = 0;
  double seconds = 0.0;
  int workers = 1;

  double queries_per_second() const noexcept { return seconds > 0 ? labeled / seconds : 0.0; }
  nlohmann::ordered_json to_json() const;
};

/// Reads raw lines, writes one JSONL weak label per well-formed line in
/// input order. Malformed lines are logged and counted. Output bytes do not
/// depend on `opts.workers`.
CorpusReport label_corpus(std::istream& in, std::ostream& out, const FunctionSet& fs,
                          const PosTagger& tagger, const CorpusOptions& opts);

/// Single-threaded reference for label_corpus; kept for equivalence tests
/// and the benchmark.
CorpusReport label_corpus_serial(std::istream& in, std::ostream& out, const FunctionSet& fs,
                                 const PosTagger& tagger, const CorpusOptions& opts);

/// In-memory batch labeling (OpenMP). Result i belongs to queries[i].
std::vector<WeakLabel> label_all(std::span<const Query> queries, const FunctionSet& fs,
                                 const PosTagger& tagger, int workers);
std::vector<WeakLabel> label_all_serial(std::span<const Query> queries, const FunctionSet& fs,
                                        const PosTagger& tagger);

}  // namespace qintent
