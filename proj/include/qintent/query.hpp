#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qintent/errors.hpp"

namespace qintent {

/// Level-1 intent taxonomy. The order here is the canonical class index
/// used by confusion matrices and per-class reservoirs.
enum class IntentLabel : std::uint8_t { Informational = 0, Navigational = 1, Transactional = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<IntentLabel, kNumLabels> kAllLabels = {
    IntentLabel::Informational, IntentLabel::Navigational, IntentLabel::Transactional};

constexpr std::size_t index_of(IntentLabel l) noexcept { return static_cast<std::size_t>(l); }

/// Lowercase wire form ("informational", ...).
std::string_view to_string(IntentLabel l) noexcept;
/// Capitalized form used in prompts ("Informational", ...).
std::string_view display_name(IntentLabel l) noexcept;

/// Case-insensitive exact match against the closed label set.
/// Throws OutOfVocabularyLabel for anything else.
IntentLabel parse_label(std::string_view text);

enum class Provenance : std::uint8_t { Weak, LlmIcl, LlmFt, Hybrid, Gold };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

/// Lowercases ASCII, collapses runs of whitespace to one space and trims.
/// Throws InvalidUtf8 or EmptyQuery.
std::string normalize(std::string_view raw);

/// Number of UTF-8 code points. Assumes valid UTF-8.
std::size_t utf8_length(std::string_view text) noexcept;
bool is_valid_utf8(std::string_view text) noexcept;

/// Stable id derived from normalized text, used when a record carries none.
std::string content_id(std::string_view normalized_text);

inline constexpr std::size_t kMaxQueryChars = 512;

/// A normalized search query. Immutable once built.
class Query {
 public:
  /// Normalizes `raw`; when `id` is empty the content hash becomes the id.
  static Query make(std::string_view raw, std::optional<std::string> id = std::nullopt);

  const std::string& text() const noexcept { return text_; }
  const std::string& id() const noexcept { return id_; }
  bool has_explicit_id() const noexcept { return explicit_id_; }

  friend bool operator==(const Query&, const Query&) = default;

 private:
  Query(std::string text, std::string id, bool explicit_id)
      : text_(std::move(text)), id_(std::move(id)), explicit_id_(explicit_id) {}

  std::string text_;
  std::string id_;
  bool explicit_id_ = false;
};

/// A classifier decision for one query.
struct Prediction {
  std::string query_id;
  IntentLabel label = IntentLabel::Informational;
  double confidence = 1.0;  // in (0, 1]
  Provenance provenance = Provenance::Weak;
  bool defaulted = false;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Throws DataError unless confidence is in (0,1] (exactly 1 for gold).
void validate(const Prediction& p);

struct GoldRecord {
  Query query;
  IntentLabel label;
};

}  // namespace qintent
