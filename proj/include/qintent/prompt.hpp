#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qintent/query.hpp"

namespace qintent {

/// In-context learning recipes, each adding content to the previous one.
enum class Scenario : std::uint8_t {
  DefinitionsOnly,
  DefinitionsKeywords,
  DefinitionsKeywordsFewShot,
  ClueAndReasoning
};

inline constexpr std::array<Scenario, 4> kAllScenarios = {
    Scenario::DefinitionsOnly, Scenario::DefinitionsKeywords,
    Scenario::DefinitionsKeywordsFewShot, Scenario::ClueAndReasoning};

/// "definitions", "definitions-keywords", "few-shot", "clue-reasoning".
std::string_view to_string(Scenario s) noexcept;
Scenario parse_scenario(std::string_view name);

class MissingBank : public DataError {
 public:
  explicit MissingBank(std::string_view scenario)
      : DataError("scenario \"" + std::string(scenario) + "\" needs a few-shot bank") {}
};

struct FewShotExample {
  std::string query;
  IntentLabel label;
  std::optional<std::string> clues;
  std::optional<std::string> reasoning;
  std::optional<std::string> decision;
};

/// Exactly five labeled examples per intent class. Either every example
/// carries clue/reasoning text or none does.
class FewShotBank {
 public:
  static constexpr std::size_t kPerLabel = 5;

  explicit FewShotBank(std::vector<FewShotExample> examples);
  /// JSONL: {"query", "label", "clues"?, "reasoning"?, "decision"?}
  static FewShotBank from_jsonl(std::string_view text);
  static const FewShotBank& builtin();

  const std::vector<FewShotExample>& examples() const noexcept { return examples_; }
  bool has_reasoning() const noexcept { return has_reasoning_; }

 private:
  std::vector<FewShotExample> examples_;
  bool has_reasoning_ = false;
};

/// Plain-text template split into named sections by "[name]" header lines.
/// Lines starting with '#' before the first header are comments.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string_view text);
  static const PromptTemplate& builtin();

  /// Throws DataError when the section is missing.
  const std::string& section(std::string_view name) const;
  bool has(std::string_view name) const noexcept;

 private:
  std::vector<std::pair<std::string, std::string>> sections_;
};

using KeywordLists = std::array<std::vector<std::string>, kNumLabels>;

struct PromptAssets {
  PromptTemplate tmpl;
  std::string definitions;
  KeywordLists keywords;
  std::optional<FewShotBank> bank;

  static const PromptAssets& builtin();
  /// Reads template.txt, definitions.txt, keywords.json and (if present)
  /// fewshot.jsonl from `dir`.
  static PromptAssets load(const std::string& dir);
};

struct PromptSection {
  std::string name;
  std::string text;
};

struct Prompt {
  std::vector<PromptSection> sections;

  std::string str() const;
  const PromptSection* find(std::string_view name) const noexcept;
};

/// Section names used by a scenario, in order.
std::vector<std::string_view> scenario_sections(Scenario s);

Prompt build_prompt(Scenario s, const Query& q, const PromptAssets& assets);
/// build_prompt(...).str(). Ends with the one-word answer instruction.
std::string render(Scenario s, const Query& q, const PromptAssets& assets = PromptAssets::builtin());

/// Extracts the intent from a model reply: an exact one-word answer, else
/// the last label word in the text. Throws OutOfVocabularyLabel.
IntentLabel parse_response(std::string_view raw);

}  // namespace qintent
