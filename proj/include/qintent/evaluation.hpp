#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qintent/query.hpp"
#include "qintent/records.hpp"

namespace qintent {

class DuplicatePrediction : public DataError {
 public:
  explicit DuplicatePrediction(const std::string& id)
      : DataError("more than one prediction for query id \"" + id + "\"") {}
};
class EmptyGold : public DataError {
 public:
  EmptyGold() : DataError("gold set is empty") {}
};
class MisalignedInputs : public DataError {
 public:
  using DataError::DataError;
};

/// Rows are gold classes, columns predicted classes. A prediction that is
/// missing or unparseable counts as a fourth "null" prediction: it is never
/// a true positive and never a false positive for any class.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels> cells{};
  std::array<std::uint64_t, kNumLabels> unparseable{};  // per gold class

  void add(IntentLabel gold, std::optional<IntentLabel> predicted) noexcept;
  std::uint64_t unparseable_count() const noexcept;
  /// Cells plus unparseable: the number of gold records scored.
  std::uint64_t total() const noexcept;
};

enum class Metric : std::uint8_t { Precision, Recall, F1 };
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::Precision, Metric::Recall, Metric::F1};
std::string_view to_string(Metric m) noexcept;

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // nothing predicted as this class
  bool recall_undefined = false;     // class absent from gold
};

struct EvalReport {
  std::array<ClassMetrics, kNumLabels> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::uint64_t n = 0;
  ConfusionMatrix matrix;

  double macro(Metric m) const noexcept;
  nlohmann::ordered_json to_json() const;
};

/// Per-class metrics from the matrix; zero denominators give 0 and set the
/// matching flag. Macro values are unweighted means over the three classes.
EvalReport report_from_matrix(const ConfusionMatrix& m);

/// One entry per gold record: its predicted label, or empty when the
/// prediction is missing or unparseable.
using AlignedPredictions = std::vector<std::optional<IntentLabel>>;

/// Predictions for ids outside the gold set are ignored and counted in
/// `unmatched` when given. Throws DuplicatePrediction, EmptyGold.
AlignedPredictions align(std::span<const Prediction> preds, std::span<const GoldRecord> gold,
                         std::size_t* unmatched = nullptr);
/// Same, from raw records: a null, absent or out-of-vocabulary label is an
/// unparseable prediction.
AlignedPredictions align_records(std::span<const Record> preds, std::span<const GoldRecord> gold,
                                 std::size_t* unmatched = nullptr);

std::vector<IntentLabel> gold_labels(std::span<const GoldRecord> gold);

EvalReport score(std::span<const Prediction> preds, std::span<const GoldRecord> gold);
EvalReport score_aligned(std::span<const std::optional<IntentLabel>> preds,
                         std::span<const IntentLabel> gold);

// ---------------------------------------------------------------------------

enum class Direction : std::uint8_t { Better, Worse, Same };
std::string_view to_string(Direction d) noexcept;

struct SignificanceResult {
  Metric metric = Metric::F1;
  double observed = 0.0;  // metric(a) - metric(b)
  double p_value = 1.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::size_t family_size = 1;  // Bonferroni m
  double corrected_alpha = 0.05;
  bool significant = false;
  Direction direction = Direction::Same;

  nlohmann::ordered_json to_json() const;
};

struct PermutationOptions {
  int iterations = 5000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t family_size = 1;
  int workers = 1;
};

/// Paired permutation test on the difference of a macro metric. Each
/// iteration swaps a[i] and b[i] with probability 1/2 using a stream
/// derived from (seed, iteration), so the result does not depend on the
/// number of workers. Two-sided p = (1 + #{|perm| >= |observed|}) / (1 + iterations).
SignificanceResult paired_permutation_test(std::span<const std::optional<IntentLabel>> a,
                                           std::span<const std::optional<IntentLabel>> b,
                                           std::span<const IntentLabel> gold, Metric metric,
                                           const PermutationOptions& opts = {});

/// Single-threaded reference implementation of the same test.
SignificanceResult paired_permutation_test_serial(std::span<const std::optional<IntentLabel>> a,
                                                  std::span<const std::optional<IntentLabel>> b,
                                                  std::span<const IntentLabel> gold, Metric metric,
                                                  const PermutationOptions& opts = {});

/// alpha / m.
double bonferroni_alpha(std::size_t m, double alpha = 0.05);
/// significant[i] = p[i] < alpha / p.size().
std::vector<bool> bonferroni(std::span<const double> p_values, double alpha = 0.05);

// ---------------------------------------------------------------------------

struct SystemPredictions {
  std::string name;
  AlignedPredictions preds;
};

struct CompareOptions {
  int iterations = 5000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t family_size = 0;  // 0: challengers x 3 metrics
  int workers = 1;
};

struct ComparisonRow {
  std::string name;
  bool baseline = false;
  EvalReport report;
  std::array<std::optional<SignificanceResult>, 3> vs_baseline;  // indexed by Metric
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // baseline first
  double alpha = 0.05;
  std::size_t family_size = 1;
  int iterations = 0;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  /// Metrics to three decimals; significant differences carry an arrow
  /// and an asterisk.
  std::string to_markdown() const;
};

ComparisonTable compare_report(const SystemPredictions& baseline,
                               std::span<const SystemPredictions> challengers,
                               std::span<const IntentLabel> gold, const CompareOptions& opts = {});

}  // namespace qintent
