#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "qintent/curation.hpp"

using namespace qintent;

namespace {

std::vector<Example> corpus(std::array<std::size_t, 3> per_class, double confidence = 1.0) {
  std::vector<Example> out;
  std::size_t k = 0;
  for (std::size_t round = 0; out.size() < per_class[0] + per_class[1] + per_class[2]; ++round)
    for (auto l : kAllLabels)
      if (round < per_class[index_of(l)])
        out.push_back({Query::make("query " + std::to_string(k++)), l, confidence, Provenance::Weak});
  return out;
}

std::set<std::string> ids(std::span<const Example> xs) {
  std::set<std::string> s;
  for (const auto& e : xs) s.insert(e.query.id());
  return s;
}

}  // namespace

TEST_CASE("stratified sample has exact per-class counts and is deterministic") {
  const auto c = corpus({400, 250, 300});
  const auto a = stratified_sample(c, 200, 17);
  const auto b = stratified_sample(c, 200, 17);
  const auto d = stratified_sample(c, 200, 18);
  for (auto l : kAllLabels) {
    CHECK(a.per_class[index_of(l)].size() == 200);
    for (const auto& e : a.per_class[index_of(l)]) CHECK(e.label == l);
  }
  CHECK(a.total() == 600);
  CHECK(a.flatten() == b.flatten());
  CHECK(a.flatten() != d.flatten());
  CHECK(ids(a.flatten()).size() == 600);
}

TEST_CASE("insufficient class") {
  const auto c = corpus({30, 10, 30});
  try {
    stratified_sample(c, 20, 1);
    FAIL("expected InsufficientClass");
  } catch (const InsufficientClass& e) {
    CHECK(e.label() == IntentLabel::Navigational);
    CHECK(e.have() == 10);
    CHECK(e.need() == 20);
  }
}

TEST_CASE("repeated ids are skipped") {
  auto c = corpus({5, 5, 5});
  c.push_back(c[0]);
  StratifiedReservoir r(5, 3);
  for (const auto& e : c) r.offer(e);
  CHECK(r.duplicates() == 1);
  CHECK(r.seen(IntentLabel::Informational) == 5);
  const auto s = std::move(r).finish();
  CHECK(ids(s.flatten()).size() == 15);
}

TEST_CASE("reservoir inclusion is close to uniform") {
  const auto c = corpus({50, 50, 50});
  std::map<std::string, int> hits;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const auto s = stratified_sample(c, 10, 1000 + t);
    for (const auto& e : s.per_class[0]) ++hits[e.query.id()];
  }
  CHECK(hits.size() == 50);
  // expected 800 per element, sd about 25
  for (const auto& [id, n] : hits) {
    CHECK(n > 650);
    CHECK(n < 950);
  }
}

TEST_CASE("truncation") {
  const auto short_q = Query::make("buy running shoes", "s1");
  const auto t0 = truncate_tokens(short_q);
  CHECK_FALSE(t0.truncated);
  CHECK(t0.query == short_q);
  CHECK(t0.original_tokens == 3);

  std::string long_text;
  for (int i = 0; i < 40; ++i) long_text += "w" + std::to_string(i) + " ";
  const auto long_q = Query::make(long_text, "L");
  const auto t1 = truncate_tokens(long_q);
  CHECK(t1.truncated);
  CHECK(t1.original_tokens == 40);
  CHECK(WhitespaceTokenizer{}.tokenize(t1.query.text()).size() == kMaxQueryTokens);
  CHECK(t1.query.id() == "L");
  CHECK(t1.query.text().rfind("w0 w1", 0) == 0);
  const auto t2 = truncate_tokens(t1.query);
  CHECK_FALSE(t2.truncated);
  CHECK(t2.query == t1.query);
  CHECK_THROWS_AS(truncate_tokens(long_q, 0), DataError);
}

TEST_CASE("custom tokenizer injection") {
  struct CharTokenizer final : Tokenizer {
    std::vector<std::string> tokenize(std::string_view text) const override {
      std::vector<std::string> out;
      for (char c : text) out.emplace_back(1, c);
      return out;
    }
    std::string detokenize(std::span<const std::string> tokens) const override {
      std::string s;
      for (const auto& t : tokens) s += t;
      return s;
    }
  };
  const auto t = truncate_tokens(Query::make("abcdef"), 4, CharTokenizer{});
  CHECK(t.truncated);
  CHECK(t.query.text() == "abcd");
}

TEST_CASE("80/20 split of 45K") {
  const auto c = corpus({15000, 15000, 15000});
  const auto s = split_train_val(c, 0.8, 5);
  CHECK(s.train.size() == 36000);
  CHECK(s.validation.size() == 9000);
  std::array<std::size_t, 3> tr{}, va{};
  for (const auto& e : s.train) ++tr[index_of(e.label)];
  for (const auto& e : s.validation) ++va[index_of(e.label)];
  CHECK(tr == std::array<std::size_t, 3>{12000, 12000, 12000});
  CHECK(va == std::array<std::size_t, 3>{3000, 3000, 3000});
  const auto a = ids(s.train), b = ids(s.validation);
  std::vector<std::string> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  CHECK(both.empty());
  CHECK(a.size() + b.size() == 45000);
  const auto again = split_train_val(c, 0.8, 5);
  CHECK(again.train == s.train);
  CHECK(again.validation == s.validation);
  CHECK_THROWS_AS(split_train_val(c, 1.0, 5), DataError);
}

TEST_CASE("split of uneven classes rounds per class") {
  const auto c = corpus({7, 3, 1});
  const auto s = split_train_val(c, 0.8, 1);
  std::array<std::size_t, 3> tr{};
  for (const auto& e : s.train) ++tr[index_of(e.label)];
  CHECK(tr == std::array<std::size_t, 3>{6, 2, 1});
  CHECK(s.train.size() + s.validation.size() == 11);
}

TEST_CASE("high-confidence selection filters, excludes and balances") {
  std::vector<Example> preds;
  for (int i = 0; i < 3000; ++i)
    preds.push_back({Query::make("p" + std::to_string(i)), kAllLabels[i % 3], (i % 100 + 1) / 100.0,
                     Provenance::LlmFt});
  StringSet exclude;
  for (int i = 0; i < 3000; i += 7) exclude.insert(Query::make("p" + std::to_string(i)).id());

  const auto sel = select_high_confidence(preds, 0.9, 50, 11, exclude);
  std::array<std::size_t, 3> oracle{};
  std::size_t excluded = 0;
  for (int i = 0; i < 3000; ++i) {
    if ((i % 100 + 1) / 100.0 < 0.9) continue;
    if (i % 7 == 0) {
      ++excluded;
      continue;
    }
    ++oracle[i % 3];
  }
  for (auto l : kAllLabels) {
    CHECK(sel.eligible[index_of(l)] == oracle[index_of(l)]);
    CHECK(sel.per_class[index_of(l)].size() == 50);
    for (const auto& e : sel.per_class[index_of(l)]) {
      CHECK(e.confidence >= 0.9);
      CHECK(e.label == l);
      CHECK_FALSE(exclude.contains(e.query.id()));
    }
  }
  CHECK(sel.excluded == excluded);
  CHECK_THROWS_AS(select_high_confidence(preds, 0.9, 200, 11, exclude), InsufficientClass);
}

TEST_CASE("threshold equality is inclusive") {
  std::vector<Example> preds;
  for (auto l : kAllLabels) preds.push_back({Query::make("edge " + std::string(to_string(l))), l, 0.88, Provenance::LlmFt});
  const auto sel = select_high_confidence(preds, 0.88, 1, 1, {});
  CHECK(sel.flatten().size() == 3);
}

TEST_CASE("assemble 45K + 15K") {
  const auto c = corpus({20000, 20000, 20000}, 0.95);
  std::vector<Example> random_pool(c.begin(), c.begin() + 45000);
  std::vector<Example> hc_pool(c.begin() + 45000, c.end());
  const auto random = stratified_sample(random_pool, 15000, 1);
  const auto hc = select_high_confidence(hc_pool, 0.9, 5000, 2, {});
  const auto set = assemble_augmented(random, hc.per_class, 0.9, 3);
  CHECK(set.records.size() == 60000);
  std::array<std::size_t, 3> per{};
  for (const auto& e : set.records) ++per[index_of(e.label)];
  CHECK(per == std::array<std::size_t, 3>{20000, 20000, 20000});
  CHECK(ids(set.records).size() == 60000);

  auto expected = random.flatten();
  for (const auto& cl : hc.per_class) expected.insert(expected.end(), cl.begin(), cl.end());
  auto got = set.records;
  auto by_id = [](const Example& a, const Example& b) { return a.query.id() < b.query.id(); };
  std::sort(expected.begin(), expected.end(), by_id);
  std::sort(got.begin(), got.end(), by_id);
  CHECK(got == expected);
}

TEST_CASE("assemble rejects overlap and low confidence") {
  const auto c = corpus({10, 10, 10});
  const auto random = stratified_sample(c, 5, 1);
  PerClass hc;
  hc[0].push_back(random.per_class[0][0]);
  CHECK_THROWS_AS(assemble_augmented(random, hc, 0.5, 1), OverlapDetected);
  hc[0][0] = {Query::make("fresh"), IntentLabel::Informational, 0.4, Provenance::LlmFt};
  CHECK_THROWS_AS(assemble_augmented(random, hc, 0.5, 1), DataError);
}

TEST_CASE("record export formats") {
  const Example e{Query::make("Buy Shoes", "7"), IntentLabel::Transactional, 0.91, Provenance::LlmFt};
  const auto r = to_record(e);
  CHECK(dump_record(r) ==
        R"({"id":"7","query":"buy shoes","label":"transactional","confidence":0.91,"provenance":"llm_ft"})");
  CHECK(dump_record(to_finetune_record(e)) == R"({"query":"buy shoes","label":"transactional"})");
  CHECK(example_from_record(r) == e);
}
