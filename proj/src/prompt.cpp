#include "qintent/prompt.hpp"

#include <filesystem>

#include "json.hpp"
#include "qintent/assets.hpp"
#include "qintent/records.hpp"

namespace qintent {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kScenarioNames = {"definitions", "definitions-keywords",
                                                            "few-shot", "clue-reasoning"};

std::string trim_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == '\n') ++b;
  return s.substr(b);
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

std::string render_keywords(const KeywordLists& kw) {
  std::string out;
  for (auto l : kAllLabels) {
    if (!out.empty()) out += '\n';
    out += display_name(l);
    out += ": ";
    const auto& words = kw[index_of(l)];
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) out += ", ";
      out += words[i];
    }
  }
  return out;
}

std::string render_examples(const FewShotBank& bank, bool with_reasoning) {
  std::string out;
  for (const auto& ex : bank.examples()) {
    if (!out.empty()) out += "\n\n";
    out += "Query: " + ex.query + '\n';
    if (with_reasoning) {
      out += "Clues: " + *ex.clues + '\n';
      out += "Reasoning: " + *ex.reasoning + '\n';
      out += "Decision: " + ex.decision.value_or(std::string(display_name(ex.label)));
    } else {
      out += "Intent: " + std::string(display_name(ex.label));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Scenario s) noexcept { return kScenarioNames[static_cast<std::size_t>(s)]; }

Scenario parse_scenario(std::string_view name) {
  for (std::size_t i = 0; i < kScenarioNames.size(); ++i)
    if (name == kScenarioNames[i]) return static_cast<Scenario>(i);
  throw DataError("unknown scenario \"" + std::string(name) +
                  "\" (expected definitions, definitions-keywords, few-shot or clue-reasoning)");
}

// ---------------------------------------------------------------------------

FewShotBank::FewShotBank(std::vector<FewShotExample> examples) : examples_(std::move(examples)) {
  std::array<std::size_t, kNumLabels> per{};
  std::size_t with_reasoning = 0;
  for (const auto& ex : examples_) {
    ++per[index_of(ex.label)];
    if (ex.clues && ex.reasoning) ++with_reasoning;
    if (ex.decision && parse_response(*ex.decision) != ex.label)
      throw DataError("few-shot example \"" + ex.query + "\" has a decision that contradicts its label");
  }
  for (auto l : kAllLabels)
    if (per[index_of(l)] != kPerLabel)
      throw DataError("few-shot bank has " + std::to_string(per[index_of(l)]) + " " +
                      std::string(to_string(l)) + " examples, need exactly 5");
  if (with_reasoning != 0 && with_reasoning != examples_.size())
    throw DataError("few-shot bank mixes examples with and without clue/reasoning text");
  has_reasoning_ = with_reasoning == examples_.size();
}

FewShotBank FewShotBank::from_jsonl(std::string_view text) {
  std::vector<FewShotExample> out;
  for (const auto& line : assets::word_list(text)) {
    auto j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("few-shot bank: malformed line");
    FewShotExample ex{normalize(j.value("query", "")), parse_label(j.value("label", "")), {}, {}, {}};
    if (j.contains("clues")) ex.clues = j["clues"].get<std::string>();
    if (j.contains("reasoning")) ex.reasoning = j["reasoning"].get<std::string>();
    if (j.contains("decision")) ex.decision = j["decision"].get<std::string>();
    out.push_back(std::move(ex));
  }
  return FewShotBank(std::move(out));
}

const FewShotBank& FewShotBank::builtin() {
  static const FewShotBank bank = from_jsonl(assets::get("prompts/fewshot.jsonl"));
  return bank;
}

// ---------------------------------------------------------------------------

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate t;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
      t.sections_.emplace_back(std::string(line.substr(1, line.size() - 2)), std::string());
      continue;
    }
    if (t.sections_.empty()) {
      if (line.empty() || line.front() == '#') continue;
      throw DataError("prompt template: text before the first [section] header");
    }
    auto& body = t.sections_.back().second;
    if (!body.empty()) body += '\n';
    body += line;
  }
  for (auto& [name, body] : t.sections_) body = trim_newlines(std::move(body));
  return t;
}

const PromptTemplate& PromptTemplate::builtin() {
  static const PromptTemplate t = parse(assets::get("prompts/template.txt"));
  return t;
}

const std::string& PromptTemplate::section(std::string_view name) const {
  for (const auto& [n, body] : sections_)
    if (n == name) return body;
  throw DataError("prompt template has no [" + std::string(name) + "] section");
}

bool PromptTemplate::has(std::string_view name) const noexcept {
  for (const auto& s : sections_)
    if (s.first == name) return true;
  return false;
}

namespace {

KeywordLists parse_keywords(std::string_view text) {
  auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("keywords asset must be a JSON object");
  KeywordLists kw;
  for (auto l : kAllLabels) {
    const auto key = std::string(to_string(l));
    if (!j.contains(key)) throw DataError("keywords asset lacks \"" + key + "\"");
    kw[index_of(l)] = j[key].get<std::vector<std::string>>();
  }
  return kw;
}

}  // namespace

const PromptAssets& PromptAssets::builtin() {
  static const PromptAssets a{PromptTemplate::builtin(),
                              trim_newlines(std::string(assets::get("prompts/definitions.txt"))),
                              parse_keywords(assets::get("prompts/keywords.json")),
                              FewShotBank::builtin()};
  return a;
}

PromptAssets PromptAssets::load(const std::string& dir) {
  PromptAssets a{PromptTemplate::parse(assets::load_text(dir + "/template.txt")),
                 trim_newlines(assets::load_text(dir + "/definitions.txt")),
                 parse_keywords(assets::load_text(dir + "/keywords.json")),
                 std::nullopt};
  if (std::filesystem::exists(dir + "/fewshot.jsonl"))
    a.bank = FewShotBank::from_jsonl(assets::load_text(dir + "/fewshot.jsonl"));
  return a;
}

// ---------------------------------------------------------------------------

std::string Prompt::str() const {
  std::string out;
  for (const auto& s : sections) {
    if (!out.empty()) out += "\n\n";
    out += s.text;
  }
  out += '\n';
  return out;
}

const PromptSection* Prompt::find(std::string_view name) const noexcept {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<std::string_view> scenario_sections(Scenario s) {
  switch (s) {
    case Scenario::DefinitionsOnly:
      return {"intro", "definitions", "query", "answer"};
    case Scenario::DefinitionsKeywords:
      return {"intro", "definitions", "keywords", "query", "answer"};
    case Scenario::DefinitionsKeywordsFewShot:
      return {"intro", "definitions", "keywords", "examples", "query", "answer"};
    case Scenario::ClueAndReasoning:
      return {"intro", "definitions", "keywords", "examples", "reasoning", "query", "answer"};
  }
  return {};
}

Prompt build_prompt(Scenario s, const Query& q, const PromptAssets& assets) {
  const bool wants_examples =
      s == Scenario::DefinitionsKeywordsFewShot || s == Scenario::ClueAndReasoning;
  if (wants_examples && !assets.bank) throw MissingBank(to_string(s));
  if (s == Scenario::ClueAndReasoning && !assets.bank->has_reasoning())
    throw MissingBank(to_string(s));

  Prompt p;
  for (auto name : scenario_sections(s)) {
    std::string text = assets.tmpl.section(name);
    if (name == "definitions") replace_all(text, "{definitions}", assets.definitions);
    if (name == "keywords") replace_all(text, "{keywords}", render_keywords(assets.keywords));
    if (name == "examples")
      replace_all(text, "{examples}", render_examples(*assets.bank, s == Scenario::ClueAndReasoning));
    if (name == "query") replace_all(text, "{query}", q.text());
    p.sections.push_back({std::string(name), std::move(text)});
  }
  return p;
}

std::string render(Scenario s, const Query& q, const PromptAssets& assets) {
  return build_prompt(s, q, assets).str();
}

// ---------------------------------------------------------------------------

IntentLabel parse_response(std::string_view raw) {
  std::string_view t = raw;
  auto strip = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '.' || c == '"' || c == '\'' ||
           c == '*' || c == '`' || c == '!';
  };
  while (!t.empty() && strip(t.front())) t.remove_prefix(1);
  while (!t.empty() && strip(t.back())) t.remove_suffix(1);
  for (auto l : kAllLabels)
    if (lower(t) == to_string(l)) return l;

  const std::string text = lower(raw);
  std::optional<IntentLabel> best;
  std::size_t best_pos = 0;
  for (auto l : kAllLabels) {
    const auto word = to_string(l);
    for (std::size_t pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) {
      const bool left_ok = pos == 0 || !is_alpha(text[pos - 1]);
      const bool right_ok = pos + word.size() == text.size() || !is_alpha(text[pos + word.size()]);
      if (left_ok && right_ok && (!best || pos > best_pos)) {
        best = l;
        best_pos = pos;
      }
    }
  }
  if (!best) throw OutOfVocabularyLabel(std::string(raw));
  return *best;
}

}  // namespace qintent
