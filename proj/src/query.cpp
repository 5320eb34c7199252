#include "qintent/query.hpp"

#include <cstdio>

namespace qintent {

namespace {

constexpr std::array<std::string_view, kNumLabels> kWire = {"informational", "navigational",
                                                           "transactional"};
constexpr std::array<std::string_view, kNumLabels> kDisplay = {"Informational", "Navigational",
                                                              "Transactional"};

constexpr std::array<std::string_view, 5> kProvenance = {"weak", "llm_icl", "llm_ft", "hybrid",
                                                         "gold"};

char ascii_lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  return true;
}

}  // namespace

std::string_view to_string(IntentLabel l) noexcept { return kWire[index_of(l)]; }
std::string_view display_name(IntentLabel l) noexcept { return kDisplay[index_of(l)]; }

IntentLabel parse_label(std::string_view text) {
  for (auto l : kAllLabels)
    if (iequals(text, kWire[index_of(l)])) return l;
  throw OutOfVocabularyLabel(std::string(text));
}

std::string_view to_string(Provenance p) noexcept { return kProvenance[static_cast<std::size_t>(p)]; }

Provenance parse_provenance(std::string_view text) {
  for (std::size_t i = 0; i < kProvenance.size(); ++i)
    if (text == kProvenance[i]) return static_cast<Provenance>(i);
  throw DataError("unknown provenance \"" + std::string(text) + "\"");
}

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
      return false;
    i += extra + 1;
  }
  return true;
}

std::size_t utf8_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

std::string normalize(std::string_view raw) {
  if (!is_valid_utf8(raw)) throw InvalidUtf8();
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(ascii_lower(c));
  }
  if (out.empty()) throw EmptyQuery();
  return out;
}

std::string content_id(std::string_view normalized_text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : normalized_text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[18];
  std::snprintf(buf, sizeof buf, "q%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Query Query::make(std::string_view raw, std::optional<std::string> id) {
  std::string text = normalize(raw);
  if (const auto n = utf8_length(text); n > kMaxQueryChars) throw QueryTooLong(n);
  if (id && !id->empty()) return Query(std::move(text), std::move(*id), true);
  std::string derived = content_id(text);
  return Query(std::move(text), std::move(derived), false);
}

void validate(const Prediction& p) {
  if (!(p.confidence > 0.0 && p.confidence <= 1.0))
    throw DataError("confidence " + std::to_string(p.confidence) + " for \"" + p.query_id +
                    "\" is outside (0, 1]");
  if (p.provenance == Provenance::Gold && p.confidence != 1.0)
    throw DataError("gold record \"" + p.query_id + "\" must carry confidence 1");
}

}  // namespace qintent
