#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qintent/prompt.hpp"

using namespace qintent;

namespace {

const char* kGoldenQuery = "how to renew a passport";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in, "missing " << p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("golden snapshots for the four scenarios") {
  const auto q = Query::make(kGoldenQuery);
  const bool update = std::getenv("QINTENT_UPDATE_GOLDEN") != nullptr;
  for (auto s : kAllScenarios) {
    const auto path = std::filesystem::path(QINTENT_GOLDEN_DIR) / (std::string(to_string(s)) + ".txt");
    const auto text = render(s, q);
    if (update) {
      std::ofstream(path, std::ios::binary) << text;
      continue;
    }
    INFO(to_string(s));
    CHECK(text == read_file(path));
  }
}

TEST_CASE("scenario structure") {
  const auto q = Query::make(kGoldenQuery);
  const auto d = render(Scenario::DefinitionsOnly, q);
  for (auto l : kAllLabels) CHECK(d.find(std::string(display_name(l)) + ": the user") != std::string::npos);
  CHECK(d.find("Query: how to renew a passport") != std::string::npos);
  CHECK(d.find("Keywords") == std::string::npos);
  CHECK(d.find("Examples") == std::string::npos);

  const auto k = render(Scenario::DefinitionsKeywords, q);
  CHECK(k.find("download") != std::string::npos);
  CHECK(k.find("login") != std::string::npos);

  const auto f = build_prompt(Scenario::DefinitionsKeywordsFewShot, q, PromptAssets::builtin());
  const auto* ex = f.find("examples");
  REQUIRE(ex != nullptr);
  CHECK(count(ex->text, "Query: ") == 15);
  CHECK(count(ex->text, "Intent: ") == 15);
  for (auto l : kAllLabels) CHECK(count(ex->text, "Intent: " + std::string(display_name(l))) == 5);

  const auto c = build_prompt(Scenario::ClueAndReasoning, q, PromptAssets::builtin());
  const auto* cex = c.find("examples");
  REQUIRE(cex != nullptr);
  CHECK(count(cex->text, "Query: ") == 15);
  std::istringstream blocks(cex->text);
  std::string block, line;
  std::vector<std::string> current;
  int checked = 0;
  auto check_block = [&](const std::vector<std::string>& ls) {
    REQUIRE(ls.size() == 4);
    CHECK(ls[0].rfind("Query: ", 0) == 0);
    CHECK(ls[1].rfind("Clues: ", 0) == 0);
    CHECK(ls[2].rfind("Reasoning: ", 0) == 0);
    CHECK(ls[3].rfind("Decision: ", 0) == 0);
    ++checked;
  };
  while (std::getline(blocks, line)) {
    if (line == "Examples:") continue;
    if (line.empty()) {
      check_block(current);
      current.clear();
    } else {
      current.push_back(line);
    }
  }
  if (!current.empty()) check_block(current);
  CHECK(checked == 15);

  for (auto s : kAllScenarios) {
    const auto text = render(s, q);
    CHECK(text.find("exactly one word") != std::string::npos);
    CHECK(text.back() == '\n');
  }
}

TEST_CASE("scenarios are cumulative") {
  const auto q = Query::make(kGoldenQuery);
  const auto& assets = PromptAssets::builtin();
  for (std::size_t i = 1; i < kAllScenarios.size(); ++i) {
    const auto prev = build_prompt(kAllScenarios[i - 1], q, assets);
    const auto next = build_prompt(kAllScenarios[i], q, assets);
    INFO(to_string(kAllScenarios[i]));
    std::size_t at = 0;
    for (const auto& s : prev.sections) {
      bool found = false;
      for (; at < next.sections.size(); ++at)
        if (next.sections[at].name == s.name) {
          found = true;
          break;
        }
      REQUIRE(found);
      const auto& ns = next.sections[at];
      if (s.name == "examples") {
        // same queries in the same order, with richer annotation
        std::istringstream a(s.text), b(ns.text);
        std::vector<std::string> qa, qb;
        std::string line;
        while (std::getline(a, line))
          if (line.rfind("Query: ", 0) == 0) qa.push_back(line);
        while (std::getline(b, line))
          if (line.rfind("Query: ", 0) == 0) qb.push_back(line);
        CHECK(qa == qb);
      } else {
        CHECK(s.text == ns.text);
      }
    }
    CHECK(next.sections.size() > prev.sections.size());
  }
}

TEST_CASE("render is injective in the query") {
  std::set<std::string> seen;
  std::mt19937_64 rng(9);
  const std::vector<std::string> words = {"buy", "cheap", "flights", "how", "to", "renew", "passport", "gmail"};
  std::set<std::string> queries;
  for (int i = 0; i < 300; ++i) {
    std::string q;
    const auto n = 1 + rng() % 4;
    for (std::size_t k = 0; k < n; ++k) q += (k ? " " : "") + words[rng() % words.size()];
    queries.insert(q);
  }
  for (auto s : kAllScenarios) {
    seen.clear();
    for (const auto& q : queries) seen.insert(render(s, Query::make(q)));
    CHECK(seen.size() == queries.size());
  }
}

TEST_CASE("missing or incomplete bank") {
  PromptAssets a = PromptAssets::builtin();
  a.bank.reset();
  const auto q = Query::make("x");
  CHECK_NOTHROW(render(Scenario::DefinitionsKeywords, q, a));
  CHECK_THROWS_AS(render(Scenario::DefinitionsKeywordsFewShot, q, a), MissingBank);
  CHECK_THROWS_AS(render(Scenario::ClueAndReasoning, q, a), MissingBank);

  std::vector<FewShotExample> ex;
  for (auto l : kAllLabels)
    for (int i = 0; i < 5; ++i) ex.push_back({"q" + std::to_string(i), l, {}, {}, {}});
  a.bank = FewShotBank(ex);
  CHECK_NOTHROW(render(Scenario::DefinitionsKeywordsFewShot, q, a));
  CHECK_THROWS_AS(render(Scenario::ClueAndReasoning, q, a), MissingBank);

  ex.pop_back();
  CHECK_THROWS_AS(FewShotBank{ex}, DataError);
  ex.push_back({"extra", IntentLabel::Transactional, "c", "r", "Transactional"});
  CHECK_THROWS_AS(FewShotBank{ex}, DataError);
}

TEST_CASE("prompt assets load from a directory") {
  const auto dir = std::string(QINTENT_DATA_DIR) + "/prompts";
  const auto a = PromptAssets::load(dir);
  const auto q = Query::make(kGoldenQuery);
  for (auto s : kAllScenarios) CHECK(render(s, q, a) == render(s, q));
  CHECK(parse_scenario("few-shot") == Scenario::DefinitionsKeywordsFewShot);
  CHECK_THROWS_AS(parse_scenario("zero-shot"), DataError);
}

TEST_CASE("few-shot queries stay out of the weak-label suite") {
  std::set<std::string> suite;
  std::ifstream in(std::string(QINTENT_TEST_DATA) + "/weak_suite_300.jsonl");
  REQUIRE(in);
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    suite.insert(normalize(j["query"].get<std::string>()));
  }
  for (const auto& ex : FewShotBank::builtin().examples()) CHECK(suite.count(ex.query) == 0);
}

TEST_CASE("parse_response") {
  CHECK(parse_response("Transactional") == IntentLabel::Transactional);
  CHECK(parse_response("  navigational.\n") == IntentLabel::Navigational);
  CHECK(parse_response("**Informational**") == IntentLabel::Informational);
  CHECK(parse_response("Clues: the word download suggests transactional. Reasoning: but it asks how, "
                       "so navigational is unlikely. Decision: informational") ==
        IntentLabel::Informational);
  CHECK(parse_response("The intent is Navigational; not transactional") == IntentLabel::Transactional);
  CHECK_THROWS_AS(parse_response("This query is commercial."), OutOfVocabularyLabel);
  CHECK_THROWS_AS(parse_response("informationally speaking"), OutOfVocabularyLabel);
  CHECK_THROWS_AS(parse_response(""), OutOfVocabularyLabel);
  for (auto l : kAllLabels) {
    CHECK(parse_response(display_name(l)) == l);
    CHECK(parse_response("Decision: " + std::string(display_name(l))) == l);
  }
}
