#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "qintent/labeling.hpp"

using namespace qintent;

namespace {

const LabelingFunction& lf(const char* name) {
  const auto* f = FunctionSet::builtin().find(name);
  REQUIRE(f != nullptr);
  return *f;
}

LabelVote vote(const char* name, const std::string& text) {
  const auto q = Query::make(text);
  const auto tags = PosTagger{}.tag(q.text());
  return lf(name).apply(q, tags);
}

std::set<std::string> keywords_of(const LabelingFunction& f) {
  const auto kws = f.to_json()["keywords"].get<std::vector<std::string>>();
  return {kws.begin(), kws.end()};
}

struct OracleResult {
  IntentLabel label;
  double confidence;
  bool defaulted;
};

// Exhaustive tally over keyword-only function sets, independent of the engine.
OracleResult oracle(const std::vector<std::pair<IntentLabel, std::set<std::string>>>& fns,
                    const std::vector<std::string>& tokens) {
  std::map<IntentLabel, int> tally;
  int n = 0;
  for (const auto& [target, kws] : fns) {
    const bool fires =
        std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return kws.count(t) > 0; });
    if (fires) {
      ++tally[target];
      ++n;
    }
  }
  if (n == 0) return {IntentLabel::Informational, 0.34, true};
  int best = -1;
  IntentLabel winner = IntentLabel::Informational;
  for (auto l : {IntentLabel::Navigational, IntentLabel::Transactional, IntentLabel::Informational})
    if (tally[l] > best) {
      best = tally[l];
      winner = l;
    }
  return {winner, static_cast<double>(best) / n, false};
}

}  // namespace

TEST_CASE("builtin set carries the quoted keywords") {
  const auto& fs = FunctionSet::builtin();
  bool txn = false, nav = false;
  for (const auto& f : fs.functions()) {
    if (f.kind() != LfKind::KeywordSet) continue;
    const auto kws = keywords_of(f);
    if (f.target() == IntentLabel::Transactional && kws.count("download") && kws.count("buy")) txn = true;
    if (f.target() == IntentLabel::Navigational && kws.count("login") && kws.count("site")) nav = true;
  }
  CHECK(txn);
  CHECK(nav);
  CHECK(fs.default_label() == IntentLabel::Informational);
  CHECK(fs.default_confidence() == doctest::Approx(0.34));
  bool has_pattern = false, has_pos = false, has_length = false;
  for (const auto& f : fs.functions()) {
    has_pattern |= f.kind() == LfKind::Pattern;
    has_pos |= f.kind() == LfKind::PosRule;
    has_length |= f.kind() == LfKind::LengthHeuristic;
  }
  CHECK(has_pattern);
  CHECK(has_pos);
  CHECK(has_length);
}

TEST_CASE("function set config round-trips") {
  const auto& fs = FunctionSet::builtin();
  const auto j = fs.to_json();
  const auto back = FunctionSet::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.size() == fs.size());
  CHECK(FunctionSet::load("builtin:functions.json").to_json() == j);
  CHECK(FunctionSet::load(std::string(QINTENT_DATA_DIR) + "/functions.json").to_json() == j);
}

TEST_CASE("function set config validation") {
  using nlohmann::ordered_json;
  auto cfg = ordered_json::parse(R"({"functions":[
    {"name":"a","kind":"keyword_set","target":"navigational","keywords":["x"]},
    {"name":"a","kind":"keyword_set","target":"navigational","keywords":["y"]}]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), DataError);
  cfg = ordered_json::parse(R"({"functions":[{"name":"a","kind":"magic","target":"navigational"}]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), DataError);
  cfg = ordered_json::parse(R"({"functions":[{"name":"a","kind":"pattern","target":"navigational","pattern":"("}]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), DataError);
  cfg = ordered_json::parse(R"({"functions":[{"name":"a","kind":"keyword_set","target":"commercial","keywords":["x"]}]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), OutOfVocabularyLabel);
  cfg = ordered_json::parse(R"({"functions":[{"name":"a","kind":"keyword_set","target":"navigational"}]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), DataError);
  cfg = ordered_json::parse(R"({"default_confidence":0,"functions":[]})");
  CHECK_THROWS_AS(FunctionSet::from_json(cfg), DataError);
  CHECK_THROWS_AS(FunctionSet::from_json(ordered_json::parse("{}")), DataError);
}

TEST_CASE("keyword functions match whole tokens only") {
  CHECK(vote("txn_keywords", "buy shoes online").label == IntentLabel::Transactional);
  CHECK(vote("nav_keywords", "buy shoes online").abstained());
  CHECK(vote("nav_keywords", "buy shoes online").source == "nav_keywords");

  auto site_only = LabelingFunction::keyword_set("site", IntentLabel::Navigational, {"site"});
  const auto q = Query::make("website design");
  CHECK(site_only.apply(q, PosTagger{}.tag(q.text())).abstained());
  CHECK(vote("nav_keywords", "website design").label == IntentLabel::Navigational);

  auto phrase = LabelingFunction::keyword_set("p", IntentLabel::Navigational, {"Sign  In"});
  const auto q1 = Query::make("gmail sign in");
  const auto q2 = Query::make("sign the form in pen");
  CHECK(phrase.apply(q1, PosTagger{}.tag(q1.text())).label == IntentLabel::Navigational);
  CHECK(phrase.apply(q2, PosTagger{}.tag(q2.text())).abstained());
}

TEST_CASE("pattern, POS and length functions") {
  CHECK(vote("nav_url_pattern", "www.bbc.co.uk").label == IntentLabel::Navigational);
  CHECK(vote("nav_url_pattern", "amazon.com").label == IntentLabel::Navigational);
  CHECK(vote("nav_url_pattern", "what is 3.5 percent").abstained());
  CHECK(vote("txn_leading_verb", "download chrome").label == IntentLabel::Transactional);
  CHECK(vote("txn_leading_verb", "how to download chrome").abstained());
  CHECK(vote("info_long_query", "best way to learn french at home").label == IntentLabel::Informational);
  CHECK(vote("info_long_query", "french lessons").abstained());
  CHECK(vote("info_long_query", "bank of america online banking login").abstained());

  auto last = LabelingFunction::pos_rule("l", IntentLabel::Transactional, PosTag::Number, TokenPosition::Last);
  auto any = LabelingFunction::pos_rule("a", IntentLabel::Transactional, PosTag::Number, TokenPosition::Any);
  const auto q = Query::make("iphone 12 case");
  const auto t = PosTagger{}.tag(q.text());
  CHECK(last.apply(q, t).abstained());
  CHECK(any.apply(q, t).label == IntentLabel::Transactional);
  CHECK_THROWS_AS(LabelingFunction::length_heuristic("z", IntentLabel::Informational, 0), DataError);
}

TEST_CASE("documented label examples") {
  const auto fb = label(Query::make("facebook login"), FunctionSet::builtin());
  CHECK(fb.label == IntentLabel::Navigational);
  CHECK(fb.confidence == 1.0);
  CHECK_FALSE(fb.defaulted);

  // Hand tally over the builtin set: info_keywords ("how") and txn_keywords
  // ("download") fire; the leading-verb rule abstains because "how" leads and
  // the query is below the length threshold. 1 vs 1, priority picks Transactional.
  const auto chrome = label(Query::make("how to download chrome"), FunctionSet::builtin());
  CHECK(chrome.tally[index_of(IntentLabel::Informational)] == 1);
  CHECK(chrome.tally[index_of(IntentLabel::Transactional)] == 1);
  CHECK(chrome.tally[index_of(IntentLabel::Navigational)] == 0);
  CHECK(chrome.label == IntentLabel::Transactional);
  CHECK(chrome.confidence == doctest::Approx(0.5));
  CHECK(chrome.tie_broken);

  const auto none = label(Query::make("zyxwv"), FunctionSet::builtin());
  CHECK(none.label == IntentLabel::Informational);
  CHECK(none.defaulted);
  CHECK(none.confidence == doctest::Approx(0.34));
  CHECK(none.votes.size() == FunctionSet::builtin().size());
}

TEST_CASE("tie-break follows the fixed label priority") {
  FunctionSet fs;
  fs.add(LabelingFunction::keyword_set("i", IntentLabel::Informational, {"a"}));
  fs.add(LabelingFunction::keyword_set("t", IntentLabel::Transactional, {"a"}));
  fs.add(LabelingFunction::keyword_set("n", IntentLabel::Navigational, {"b"}));
  auto w = label(Query::make("a"), fs);
  CHECK(w.label == IntentLabel::Transactional);
  CHECK(w.tie_broken);
  w = label(Query::make("a b"), fs);
  CHECK(w.label == IntentLabel::Navigational);
  CHECK(w.confidence == doctest::Approx(1.0 / 3.0));
  w = label(Query::make("b"), fs);
  CHECK_FALSE(w.tie_broken);
  CHECK(w.confidence == 1.0);
}

TEST_CASE("brute-force oracle, order invariance and monotonicity on random sets") {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::pair<IntentLabel, std::set<std::string>>> sets;
    FunctionSet fs;
    const auto n_fns = 1 + rng() % 5;
    for (std::size_t f = 0; f < n_fns; ++f) {
      const auto target = kAllLabels[rng() % 3];
      std::set<std::string> kws;
      const auto n_kw = 1 + rng() % 3;
      for (std::size_t k = 0; k < n_kw; ++k) kws.insert(vocab[rng() % vocab.size()]);
      sets.emplace_back(target, kws);
      fs.add(LabelingFunction::keyword_set("f" + std::to_string(f), target, {kws.begin(), kws.end()}));
    }
    std::vector<std::string> tokens;
    std::string text;
    const auto n_tok = 1 + rng() % 4;
    for (std::size_t k = 0; k < n_tok; ++k) {
      tokens.push_back(vocab[rng() % vocab.size()]);
      text += (k ? " " : "") + tokens.back();
    }
    const auto q = Query::make(text);
    const auto w = label(q, fs);
    const auto o = oracle(sets, tokens);
    INFO("trial " << trial << ": " << text);
    CHECK(w.label == o.label);
    CHECK(w.confidence == doctest::Approx(o.confidence).epsilon(1e-12));
    CHECK(w.defaulted == o.defaulted);
    CHECK(w.confidence > 0.0);
    CHECK(w.confidence <= 1.0);

    // same functions, reversed order
    FunctionSet rev;
    for (auto it = fs.functions().rbegin(); it != fs.functions().rend(); ++it) rev.add(*it);
    const auto wr = label(q, rev);
    CHECK(wr.label == w.label);
    CHECK(wr.confidence == w.confidence);

    // an extra function that abstains on q
    FunctionSet more = fs;
    more.add(LabelingFunction::keyword_set("silent", kAllLabels[rng() % 3], {"never-in-vocab"}));
    const auto wm = label(q, more);
    CHECK(wm.label == w.label);
    CHECK(wm.confidence == w.confidence);

    if (w.non_abstain() > 0 && w.tally[index_of(w.label)] == w.non_abstain()) CHECK(w.confidence == 1.0);
  }
}

TEST_CASE("weak label records") {
  const auto q = Query::make("facebook login", "42");
  const auto w = label(q, FunctionSet::builtin());
  const auto r = to_record(q, w);
  CHECK(r.id == "42");
  CHECK(r.provenance == "weak");
  CHECK(r.extra["votes"]["nav_keywords"] == "navigational");
  CHECK(r.extra["votes"]["txn_keywords"] == "abstain");
  const auto back = weak_label_from_record(parse_jsonl_record(dump_record(r)));
  CHECK(back.label == w.label);
  CHECK(back.confidence == w.confidence);
  CHECK(back.tally == w.tally);
  CHECK(back.votes == w.votes);
  CHECK_FALSE(to_record(q, w, false).extra.contains("votes"));
  const auto p = to_prediction(q, w);
  CHECK(p.query_id == "42");
  CHECK(p.provenance == Provenance::Weak);
}

TEST_CASE("corpus labeling: order, malformed lines, parallel equals serial") {
  std::ostringstream src;
  for (int i = 0; i < 3000; ++i) {
    if (i % 500 == 7) {
      src << "{broken\n";
      continue;
    }
    const char* texts[] = {"facebook login", "buy shoes", "how tall is everest", "nintendo switch"};
    src << R"({"id":")" << i << R"(","query":")" << texts[i % 4] << " " << i << "\"}\n";
  }
  const auto input = src.str();
  CorpusOptions opts;
  opts.chunk_lines = 256;
  std::istringstream in1(input), in2(input);
  std::ostringstream out1, out2;
  const auto r1 = label_corpus_serial(in1, out1, FunctionSet::builtin(), PosTagger{}, opts);
  opts.workers = 8;
  const auto r2 = label_corpus(in2, out2, FunctionSet::builtin(), PosTagger{}, opts);
  CHECK(out1.str() == out2.str());
  CHECK(r1.lines == 3000);
  CHECK(r1.malformed == 6);
  CHECK(r1.labeled == 2994);
  CHECK(r2.labeled == r1.labeled);
  CHECK(r2.per_label == r1.per_label);

  std::istringstream lines(out1.str());
  std::string line;
  std::size_t n = 0;
  int prev = -1;
  while (std::getline(lines, line)) {
    const auto rec = parse_jsonl_record(line);
    const int id = std::stoi(*rec.id);
    CHECK(id > prev);
    prev = id;
    ++n;
  }
  CHECK(n == 2994);
}

TEST_CASE("label_all parallel equals serial") {
  std::vector<Query> qs;
  for (int i = 0; i < 2000; ++i) qs.push_back(Query::make("download song " + std::to_string(i % 37)));
  qs.push_back(Query::make("www.example.org"));
  const PosTagger tagger;
  const auto a = label_all_serial(qs, FunctionSet::builtin(), tagger);
  const auto b = label_all(qs, FunctionSet::builtin(), tagger, 6);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].votes == b[i].votes);
  }
}
