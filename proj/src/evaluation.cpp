#include "qintent/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "metric_counts.hpp"

namespace qintent {

using nlohmann::ordered_json;

void ConfusionMatrix::add(IntentLabel gold, std::optional<IntentLabel> predicted) noexcept {
  if (predicted)
    ++cells[index_of(gold)][index_of(*predicted)];
  else
    ++unparseable[index_of(gold)];
}

std::uint64_t ConfusionMatrix::unparseable_count() const noexcept {
  return unparseable[0] + unparseable[1] + unparseable[2];
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = unparseable_count();
  for (const auto& row : cells)
    for (auto c : row) t += c;
  return t;
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Precision:
      return "precision";
    case Metric::Recall:
      return "recall";
    case Metric::F1:
      return "f1";
  }
  return "?";
}

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Better:
      return "better";
    case Direction::Worse:
      return "worse";
    case Direction::Same:
      return "same";
  }
  return "?";
}

double EvalReport::macro(Metric m) const noexcept {
  switch (m) {
    case Metric::Precision:
      return macro_precision;
    case Metric::Recall:
      return macro_recall;
    case Metric::F1:
      return macro_f1;
  }
  return 0.0;
}

EvalReport report_from_matrix(const ConfusionMatrix& m) {
  EvalReport r;
  r.matrix = m;
  r.n = m.total();
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    std::uint64_t tp = m.cells[k][k], predicted = 0, gold = m.unparseable[k];
    for (std::size_t j = 0; j < kNumLabels; ++j) {
      predicted += m.cells[j][k];
      gold += m.cells[k][j];
    }
    auto& c = r.per_class[k];
    c.precision_undefined = predicted == 0;
    c.recall_undefined = gold == 0;
    c.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
    c.recall = gold ? static_cast<double>(tp) / gold : 0.0;
    c.f1 = detail::f1(c.precision, c.recall);
    r.macro_precision += c.precision;
    r.macro_recall += c.recall;
    r.macro_f1 += c.f1;
  }
  r.macro_precision /= kNumLabels;
  r.macro_recall /= kNumLabels;
  r.macro_f1 /= kNumLabels;
  return r;
}

ordered_json EvalReport::to_json() const {
  ordered_json j;
  j["n"] = n;
  j["macro"] = {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}};
  ordered_json pc = ordered_json::object();
  for (auto l : kAllLabels) {
    const auto& c = per_class[index_of(l)];
    ordered_json e{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
    if (c.precision_undefined) e["precision_undefined"] = true;
    if (c.recall_undefined) e["recall_undefined"] = true;
    pc[std::string(to_string(l))] = std::move(e);
  }
  j["per_class"] = std::move(pc);
  ordered_json cm = ordered_json::object();
  for (auto g : kAllLabels) {
    ordered_json row = ordered_json::object();
    for (auto p : kAllLabels) row[std::string(to_string(p))] = matrix.cells[index_of(g)][index_of(p)];
    row["unparseable"] = matrix.unparseable[index_of(g)];
    cm[std::string(to_string(g))] = std::move(row);
  }
  j["confusion"] = std::move(cm);
  j["unparseable"] = matrix.unparseable_count();
  return j;
}

// ---------------------------------------------------------------------------

namespace {

std::unordered_map<std::string_view, std::size_t> index_gold(std::span<const GoldRecord> gold) {
  if (gold.empty()) throw EmptyGold();
  std::unordered_map<std::string_view, std::size_t> idx;
  idx.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (!idx.emplace(gold[i].query.id(), i).second)
      throw DataError("duplicate gold id \"" + gold[i].query.id() + "\"");
  return idx;
}

}  // namespace

AlignedPredictions align(std::span<const Prediction> preds, std::span<const GoldRecord> gold,
                         std::size_t* unmatched) {
  const auto idx = index_gold(gold);
  AlignedPredictions out(gold.size());
  std::vector<bool> seen(gold.size(), false);
  std::size_t extra = 0;
  for (const auto& p : preds) {
    auto it = idx.find(p.query_id);
    if (it == idx.end()) {
      ++extra;
      continue;
    }
    if (seen[it->second]) throw DuplicatePrediction(p.query_id);
    seen[it->second] = true;
    out[it->second] = p.label;
  }
  if (unmatched) *unmatched = extra;
  return out;
}

AlignedPredictions align_records(std::span<const Record> preds, std::span<const GoldRecord> gold,
                                 std::size_t* unmatched) {
  const auto idx = index_gold(gold);
  AlignedPredictions out(gold.size());
  std::vector<bool> seen(gold.size(), false);
  std::size_t extra = 0;
  for (const auto& r : preds) {
    const auto id = to_query(r).id();
    auto it = idx.find(id);
    if (it == idx.end()) {
      ++extra;
      continue;
    }
    if (seen[it->second]) throw DuplicatePrediction(id);
    seen[it->second] = true;
    if (r.label) {
      try {
        out[it->second] = parse_label(*r.label);
      } catch (const OutOfVocabularyLabel&) {
        // scored as an unparseable prediction
      }
    }
  }
  if (unmatched) *unmatched = extra;
  return out;
}

std::vector<IntentLabel> gold_labels(std::span<const GoldRecord> gold) {
  std::vector<IntentLabel> out;
  out.reserve(gold.size());
  for (const auto& g : gold) out.push_back(g.label);
  return out;
}

EvalReport score_aligned(std::span<const std::optional<IntentLabel>> preds,
                         std::span<const IntentLabel> gold) {
  if (gold.empty()) throw EmptyGold();
  if (preds.size() != gold.size())
    throw MisalignedInputs("predictions and gold differ in length");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) m.add(gold[i], preds[i]);
  return report_from_matrix(m);
}

EvalReport score(std::span<const Prediction> preds, std::span<const GoldRecord> gold) {
  const auto aligned = align(preds, gold);
  const auto labels = gold_labels(gold);
  return score_aligned(aligned, labels);
}

// ---------------------------------------------------------------------------

double bonferroni_alpha(std::size_t m, double alpha) {
  if (m == 0) throw DataError("Bonferroni family must contain at least one test");
  return alpha / static_cast<double>(m);
}

std::vector<bool> bonferroni(std::span<const double> p_values, double alpha) {
  const double corrected = bonferroni_alpha(p_values.size(), alpha);
  std::vector<bool> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(p < corrected);
  return out;
}

ordered_json SignificanceResult::to_json() const {
  ordered_json j;
  j["metric"] = std::string(to_string(metric));
  j["observed_difference"] = observed;
  j["p_value"] = p_value;
  j["iterations"] = iterations;
  j["seed"] = seed;
  j["family_size"] = family_size;
  j["corrected_alpha"] = corrected_alpha;
  j["significant"] = significant;
  j["direction"] = std::string(to_string(direction));
  return j;
}

ComparisonTable compare_report(const SystemPredictions& baseline,
                               std::span<const SystemPredictions> challengers,
                               std::span<const IntentLabel> gold, const CompareOptions& opts) {
  ComparisonTable t;
  t.alpha = opts.alpha;
  t.iterations = opts.iterations;
  t.seed = opts.seed;
  t.family_size = opts.family_size ? opts.family_size
                                   : std::max<std::size_t>(1, challengers.size() * kAllMetrics.size());

  t.rows.push_back({baseline.name, true, score_aligned(baseline.preds, gold), {}});
  for (std::size_t c = 0; c < challengers.size(); ++c) {
    const auto& sys = challengers[c];
    ComparisonRow row{sys.name, false, score_aligned(sys.preds, gold), {}};
    for (auto m : kAllMetrics) {
      PermutationOptions po;
      po.iterations = opts.iterations;
      po.seed = opts.seed;
      po.alpha = opts.alpha;
      po.family_size = t.family_size;
      po.workers = opts.workers;
      row.vs_baseline[static_cast<std::size_t>(m)] =
          paired_permutation_test(sys.preds, baseline.preds, gold, m, po);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

ordered_json ComparisonTable::to_json() const {
  ordered_json j;
  j["statistic"] = "difference of macro metric, tested separately per metric";
  j["iterations"] = iterations;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["family_size"] = family_size;
  j["corrected_alpha"] = bonferroni_alpha(family_size, alpha);
  ordered_json rows = ordered_json::array();
  for (const auto& r : this->rows) {
    ordered_json row;
    row["name"] = r.name;
    row["baseline"] = r.baseline;
    row["report"] = r.report.to_json();
    if (!r.baseline) {
      ordered_json sig = ordered_json::object();
      for (auto m : kAllMetrics)
        if (const auto& s = r.vs_baseline[static_cast<std::size_t>(m)])
          sig[std::string(to_string(m))] = s->to_json();
      row["vs_baseline"] = std::move(sig);
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string ComparisonTable::to_markdown() const {
  std::string out = "| System | Precision | Recall | F1-score |\n|---|---|---|---|\n";
  char buf[32];
  for (const auto& r : rows) {
    out += "| " + r.name + (r.baseline ? " (baseline)" : "");
    for (auto m : kAllMetrics) {
      std::snprintf(buf, sizeof buf, "%.3f", r.report.macro(m));
      out += " | ";
      out += buf;
      const auto& s = r.vs_baseline[static_cast<std::size_t>(m)];
      if (s && s->significant) out += s->direction == Direction::Better ? "↑*" : "↓*";
    }
    out += " |\n";
  }
  std::snprintf(buf, sizeof buf, "%.6g", bonferroni_alpha(family_size, alpha));
  out += "\n* paired permutation test (" + std::to_string(iterations) +
         " iterations), Bonferroni-corrected alpha " + buf + " (m = " + std::to_string(family_size) +
         ")\n";
  return out;
}

}  // namespace qintent
