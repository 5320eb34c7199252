#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qintent/evaluation.hpp"

using namespace qintent;
using qintent::test::enumerate_instances;
using qintent::test::oracle_macro;

namespace {

constexpr auto I = IntentLabel::Informational;
constexpr auto N = IntentLabel::Navigational;
constexpr auto T = IntentLabel::Transactional;

std::vector<GoldRecord> make_gold(const std::vector<IntentLabel>& labels) {
  std::vector<GoldRecord> g;
  for (std::size_t i = 0; i < labels.size(); ++i)
    g.push_back({Query::make("gold " + std::to_string(i), "g" + std::to_string(i)), labels[i]});
  return g;
}

std::vector<Prediction> make_preds(const std::vector<IntentLabel>& labels) {
  std::vector<Prediction> p;
  for (std::size_t i = 0; i < labels.size(); ++i)
    p.push_back({"g" + std::to_string(i), labels[i], 1.0, Provenance::Weak, false});
  return p;
}

}  // namespace

TEST_CASE("hand-tallied example") {
  const auto gold = make_gold({I, I, N, T});
  const auto r = score(make_preds({I, N, N, T}), gold);
  CHECK(r.per_class[0].precision == 1.0);
  CHECK(r.per_class[0].recall == 0.5);
  CHECK(r.per_class[1].precision == 0.5);
  CHECK(r.per_class[1].recall == 1.0);
  CHECK(r.per_class[2].precision == 1.0);
  CHECK(r.per_class[2].recall == 1.0);
  CHECK(r.macro_recall == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(r.macro_precision == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  const double f_i = 2 * 1.0 * 0.5 / 1.5, f_n = 2 * 0.5 * 1.0 / 1.5;
  CHECK(r.macro_f1 == doctest::Approx((f_i + f_n + 1.0) / 3).epsilon(1e-15));
  CHECK(r.n == 4);
}

TEST_CASE("perfect predictions and empty classes") {
  const auto gold = make_gold({I, N, T, T});
  const auto r = score(make_preds({I, N, T, T}), gold);
  CHECK(r.macro_precision == 1.0);
  CHECK(r.macro_recall == 1.0);
  CHECK(r.macro_f1 == 1.0);

  const auto r2 = score(make_preds({I, I}), make_gold({I, I}));
  CHECK(r2.per_class[1].precision_undefined);
  CHECK(r2.per_class[1].recall_undefined);
  CHECK(r2.per_class[1].f1 == 0.0);
  CHECK(r2.macro_f1 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("missing predictions are wrong, duplicates and empty gold are errors") {
  const auto gold = make_gold({I, N});
  auto preds = make_preds({I});
  const auto r = score(preds, gold);
  CHECK(r.matrix.unparseable_count() == 1);
  CHECK(r.per_class[1].recall == 0.0);
  CHECK(r.n == 2);
  preds.push_back(preds[0]);
  CHECK_THROWS_AS(score(preds, gold), DuplicatePrediction);
  CHECK_THROWS_AS(score(preds, std::vector<GoldRecord>{}), EmptyGold);
}

TEST_CASE("record alignment treats OOV and null labels as unparseable") {
  const auto gold = make_gold({I, N, T});
  std::vector<Record> rs(4);
  rs[0].id = "g0";
  rs[0].query = "gold 0";
  rs[0].label = "informational";
  rs[1].id = "g1";
  rs[1].query = "gold 1";
  rs[1].label = "commercial";
  rs[2].id = "g2";
  rs[2].query = "gold 2";
  rs[3].id = "elsewhere";
  rs[3].query = "x";
  rs[3].label = "navigational";
  std::size_t unmatched = 0;
  const auto a = align_records(rs, gold, &unmatched);
  CHECK(a[0] == I);
  CHECK_FALSE(a[1]);
  CHECK_FALSE(a[2]);
  CHECK(unmatched == 1);
}

TEST_CASE("exhaustive oracle equivalence, n <= 4 with null predictions") {
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 4; ++n)
    enumerate_instances(n, true, [&](const auto& gold, const auto& pred) {
      const auto r = score_aligned(pred, gold);
      const auto o = oracle_macro(pred, gold);
      ++cases;
      REQUIRE(std::abs(r.macro_precision - o.precision) <= 1e-12);
      REQUIRE(std::abs(r.macro_recall - o.recall) <= 1e-12);
      REQUIRE(std::abs(r.macro_f1 - o.f1) <= 1e-12);
    });
  CHECK(cases == 12 + 144 + 1728 + 20736);
}

TEST_CASE("metrics are invariant under record order") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<IntentLabel> gold(50);
    std::vector<std::optional<IntentLabel>> pred(50);
    for (std::size_t i = 0; i < 50; ++i) {
      gold[i] = kAllLabels[rng() % 3];
      const auto p = rng() % 4;
      pred[i] = p == 3 ? std::nullopt : std::optional<IntentLabel>(kAllLabels[p]);
    }
    const auto a = score_aligned(pred, gold);
    std::vector<std::size_t> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<IntentLabel> g2;
    std::vector<std::optional<IntentLabel>> p2;
    for (auto i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    const auto b = score_aligned(p2, g2);
    CHECK(a.macro_f1 == b.macro_f1);
    CHECK(a.macro_precision == b.macro_precision);
  }
}

TEST_CASE("Bonferroni arithmetic") {
  CHECK(bonferroni(std::vector<double>{0.03}, 0.05) == std::vector<bool>{true});
  std::vector<double> ps(8, 0.5);
  ps[0] = 0.01;
  ps[1] = 0.001;
  ps[2] = 0.00625;
  const auto sig = bonferroni(ps, 0.05);
  CHECK_FALSE(sig[0]);
  CHECK(sig[1]);
  CHECK_FALSE(sig[2]);
  CHECK(bonferroni_alpha(8, 0.05) == 0.05 / 8);
  CHECK_THROWS_AS(bonferroni_alpha(0), DataError);
}

TEST_CASE("permutation test calibration") {
  std::vector<IntentLabel> gold(200);
  std::vector<std::optional<IntentLabel>> right(200), wrong(200);
  for (std::size_t i = 0; i < 200; ++i) {
    gold[i] = kAllLabels[i % 3];
    right[i] = gold[i];
    wrong[i] = kAllLabels[(i + 1) % 3];
  }
  PermutationOptions o;
  o.iterations = 5000;
  o.seed = 99;
  for (auto m : kAllMetrics) {
    const auto same = paired_permutation_test(right, right, gold, m, o);
    CHECK(same.p_value == 1.0);
    CHECK(same.observed == 0.0);
    CHECK(same.direction == Direction::Same);
    const auto sep = paired_permutation_test(right, wrong, gold, m, o);
    CHECK(sep.p_value <= 0.001);
    CHECK(sep.p_value >= 1.0 / 5001);
    CHECK(sep.direction == Direction::Better);
    CHECK(sep.significant);
  }
}

TEST_CASE("permutation test: determinism, symmetry, serial = parallel") {
  std::mt19937_64 rng(4);
  std::vector<IntentLabel> gold(300);
  std::vector<std::optional<IntentLabel>> a(300), b(300);
  for (std::size_t i = 0; i < 300; ++i) {
    gold[i] = kAllLabels[rng() % 3];
    a[i] = rng() % 10 < 7 ? gold[i] : kAllLabels[rng() % 3];
    b[i] = rng() % 10 < 6 ? gold[i] : (rng() % 5 ? std::optional(kAllLabels[rng() % 3]) : std::nullopt);
  }
  PermutationOptions o;
  o.iterations = 2000;
  o.seed = 12345;
  for (auto m : kAllMetrics) {
    const auto s = paired_permutation_test_serial(a, b, gold, m, o);
    o.workers = 1;
    const auto p1 = paired_permutation_test(a, b, gold, m, o);
    o.workers = 7;
    const auto p7 = paired_permutation_test(a, b, gold, m, o);
    const auto rev = paired_permutation_test(b, a, gold, m, o);
    CHECK(s.p_value == p1.p_value);
    CHECK(s.p_value == p7.p_value);
    CHECK(s.to_json().dump() == p7.to_json().dump());
    CHECK(rev.p_value == s.p_value);
    CHECK(rev.observed == -s.observed);
    CHECK(s.p_value >= 1.0 / 2001);
    CHECK(s.p_value <= 1.0);
    o.workers = 1;
  }
  CHECK_THROWS_AS(paired_permutation_test(a, std::vector<std::optional<IntentLabel>>(3), gold, Metric::F1, o),
                  MisalignedInputs);
}

TEST_CASE("comparison table") {
  std::vector<IntentLabel> gold(120);
  std::vector<std::optional<IntentLabel>> base(120), same(120), better(120);
  for (std::size_t i = 0; i < 120; ++i) {
    gold[i] = kAllLabels[i % 3];
    base[i] = i % 2 ? gold[i] : kAllLabels[(i + 1) % 3];
    same[i] = base[i];
    better[i] = gold[i];
  }
  CompareOptions o;
  o.iterations = 1000;
  o.seed = 5;
  const std::vector<SystemPredictions> ch = {{"same", same}, {"better", better}};
  const auto t = compare_report({"base", base}, ch, gold, o);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.family_size == 6);
  CHECK(t.rows[0].baseline);
  for (auto m : kAllMetrics) {
    CHECK_FALSE(t.rows[1].vs_baseline[static_cast<std::size_t>(m)]->significant);
    CHECK(t.rows[2].vs_baseline[static_cast<std::size_t>(m)]->significant);
  }

  // markdown and JSON carry the same values
  const auto j = t.to_json();
  const auto md = t.to_markdown();
  for (const auto& row : j["rows"]) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", row["report"]["macro"]["f1"].get<double>());
    const auto line_at = md.find("| " + row["name"].get<std::string>());
    REQUIRE(line_at != std::string::npos);
    const auto line = md.substr(line_at, md.find('\n', line_at) - line_at);
    CHECK(line.find(buf) != std::string::npos);
    const bool sig = !row["baseline"].get<bool>() && row["vs_baseline"]["f1"]["significant"].get<bool>();
    CHECK((line.find("↑*") != std::string::npos) == sig);
  }
  CHECK(j["corrected_alpha"].get<double>() == doctest::Approx(0.05 / 6));
}
