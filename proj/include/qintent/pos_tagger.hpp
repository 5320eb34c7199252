#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qintent/string_set.hpp"

namespace qintent {

enum class PosTag : std::uint8_t {
  Verb,
  Noun,
  Adjective,
  QuestionWord,
  Preposition,
  Determiner,
  Number,
  Other
};

std::string_view to_string(PosTag t) noexcept;
/// Case-insensitive; throws DataError on unknown names.
PosTag parse_pos_tag(std::string_view name);

struct TaggedToken {
  std::string_view token;  // view into the tagged text
  PosTag tag;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

/// Splits normalized text on single spaces.
std::vector<std::string_view> tokenize(std::string_view normalized);

/// Word lists driving the tagger. Each list is one token per line with
/// '#' comments (see data/lexicon/).
struct Lexicon {
  StringSet question_words;
  StringSet determiners;
  StringSet prepositions;
  StringSet verbs;
  std::vector<std::string> noun_suffixes;
  std::vector<std::string> adjective_suffixes;
  std::vector<std::string> adverb_suffixes;

  /// The lists shipped in data/lexicon/.
  static const Lexicon& builtin();
  /// Loads `<dir>/question_words.txt` etc.
  static Lexicon from_directory(const std::string& dir);
};

/// Context-free lexicon/suffix tagger. Rules, first match wins:
///   1. closed-class lists (question words, determiners, prepositions)
///   2. verb list
///   3. shape and suffix rules (digits -> Number, -ly -> Other,
///      -tion/-ness/-ment -> Noun, -ous/-ful/... -> Adjective)
///   4. Noun
class PosTagger {
 public:
  PosTagger() : PosTagger(Lexicon::builtin()) {}
  explicit PosTagger(Lexicon lex) : lex_(std::move(lex)) {}

  PosTag tag_token(std::string_view token) const;
  /// The returned views point into `normalized`.
  std::vector<TaggedToken> tag(std::string_view normalized) const;

  const Lexicon& lexicon() const noexcept { return lex_; }

 private:
  Lexicon lex_;
};

}  // namespace qintent
