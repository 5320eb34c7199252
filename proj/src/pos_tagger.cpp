#include "qintent/pos_tagger.hpp"

#include <array>

#include "qintent/assets.hpp"
#include "qintent/errors.hpp"

namespace qintent {

namespace {

constexpr std::array<std::string_view, 8> kTagNames = {
    "verb", "noun", "adjective", "question_word", "preposition", "determiner", "number", "other"};

StringSet as_set(std::string_view text) {
  auto words = assets::word_list(text);
  return {words.begin(), words.end()};
}

bool ends_with_any(std::string_view token, const std::vector<std::string>& suffixes) {
  for (const auto& s : suffixes)
    // the suffix alone is not a match ("ly", "less")
    if (token.size() > s.size() && token.ends_with(s)) return true;
  return false;
}

bool looks_numeric(std::string_view token) {
  bool digit = false;
  for (char c : token) {
    if (c >= '0' && c <= '9')
      digit = true;
    else if (c != '.' && c != ',' && c != ':' && c != '/' && c != '-')
      return false;
  }
  return digit;
}

}  // namespace

std::string_view to_string(PosTag t) noexcept { return kTagNames[static_cast<std::size_t>(t)]; }

PosTag parse_pos_tag(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  for (std::size_t i = 0; i < kTagNames.size(); ++i)
    if (lower == kTagNames[i]) return static_cast<PosTag>(i);
  throw DataError("unknown POS tag \"" + std::string(name) + "\"");
}

std::vector<std::string_view> tokenize(std::string_view normalized) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < normalized.size()) {
    auto sp = normalized.find(' ', start);
    if (sp == std::string_view::npos) sp = normalized.size();
    if (sp > start) out.push_back(normalized.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = [] {
    Lexicon l;
    l.question_words = as_set(assets::get("lexicon/question_words.txt"));
    l.determiners = as_set(assets::get("lexicon/determiners.txt"));
    l.prepositions = as_set(assets::get("lexicon/prepositions.txt"));
    l.verbs = as_set(assets::get("lexicon/verbs.txt"));
    l.noun_suffixes = assets::word_list(assets::get("lexicon/noun_suffixes.txt"));
    l.adjective_suffixes = assets::word_list(assets::get("lexicon/adjective_suffixes.txt"));
    l.adverb_suffixes = assets::word_list(assets::get("lexicon/adverb_suffixes.txt"));
    return l;
  }();
  return lex;
}

Lexicon Lexicon::from_directory(const std::string& dir) {
  auto read = [&](const char* name) { return assets::load_text(dir + "/" + name); };
  Lexicon l;
  l.question_words = as_set(read("question_words.txt"));
  l.determiners = as_set(read("determiners.txt"));
  l.prepositions = as_set(read("prepositions.txt"));
  l.verbs = as_set(read("verbs.txt"));
  l.noun_suffixes = assets::word_list(read("noun_suffixes.txt"));
  l.adjective_suffixes = assets::word_list(read("adjective_suffixes.txt"));
  l.adverb_suffixes = assets::word_list(read("adverb_suffixes.txt"));
  return l;
}

PosTag PosTagger::tag_token(std::string_view token) const {
  if (lex_.question_words.contains(token)) return PosTag::QuestionWord;
  if (lex_.determiners.contains(token)) return PosTag::Determiner;
  if (lex_.prepositions.contains(token)) return PosTag::Preposition;
  if (lex_.verbs.contains(token)) return PosTag::Verb;
  if (looks_numeric(token)) return PosTag::Number;
  if (ends_with_any(token, lex_.adverb_suffixes)) return PosTag::Other;
  if (ends_with_any(token, lex_.noun_suffixes)) return PosTag::Noun;
  if (ends_with_any(token, lex_.adjective_suffixes)) return PosTag::Adjective;
  return PosTag::Noun;
}

std::vector<TaggedToken> PosTagger::tag(std::string_view normalized) const {
  std::vector<TaggedToken> out;
  for (auto tok : tokenize(normalized)) out.push_back({tok, tag_token(tok)});
  return out;
}

}  // namespace qintent
