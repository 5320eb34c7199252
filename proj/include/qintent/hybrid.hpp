#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qintent/labeling.hpp"
#include "qintent/query.hpp"

namespace qintent {

class InvalidPolicy : public DataError {
 public:
  using DataError::DataError;
};

enum class HybridMode : std::uint8_t {
  /// Keep the LLM label when weak supervision abstained or agrees;
  /// otherwise switch to the weak label if it is confident enough.
  FilterAgree,
  /// A non-defaulted weak label always wins.
  WsOverride,
  /// argmax_l  w * llm_conf * [l == llm]  +  (1 - w) * ws_fraction(l)
  ConfidenceBlend
};

std::string_view to_string(HybridMode m) noexcept;

struct HybridPolicy {
  HybridMode mode = HybridMode::FilterAgree;
  double ws_min_confidence = 0.9;  // FilterAgree only
  double blend_weight = 0.5;       // ConfidenceBlend only

  /// Throws InvalidPolicy.
  void validate() const;
  /// {"mode": "filter_agree" | "ws_override" | "confidence_blend",
  ///  "ws_min_confidence"?, "blend_weight"?}
  static HybridPolicy from_json(const nlohmann::ordered_json& j);
  nlohmann::ordered_json to_json() const;
};

/// `llm` is empty when the LLM reply was out of vocabulary or failed; the
/// weak label is used then. The result has provenance hybrid and carries
/// the weak label's defaulted flag whenever the weak label decided.
Prediction hybrid_classify(const Query& q, const std::optional<Prediction>& llm, const WeakLabel& ws,
                           const HybridPolicy& policy);

}  // namespace qintent
