#include "qintent/hybrid.hpp"

namespace qintent {

namespace {

Prediction from_ws(const Query& q, const WeakLabel& ws) {
  return Prediction{q.id(), ws.label, ws.confidence, Provenance::Hybrid, ws.defaulted};
}

Prediction from_llm(const Query& q, const Prediction& llm) {
  return Prediction{q.id(), llm.label, llm.confidence, Provenance::Hybrid, false};
}

}  // namespace

std::string_view to_string(HybridMode m) noexcept {
  switch (m) {
    case HybridMode::FilterAgree:
      return "filter_agree";
    case HybridMode::WsOverride:
      return "ws_override";
    case HybridMode::ConfidenceBlend:
      return "confidence_blend";
  }
  return "?";
}

void HybridPolicy::validate() const {
  if (!(ws_min_confidence >= 0.0 && ws_min_confidence <= 1.0))
    throw InvalidPolicy("ws_min_confidence must be in [0, 1]");
  if (!(blend_weight >= 0.0 && blend_weight <= 1.0))
    throw InvalidPolicy("blend_weight must be in [0, 1]");
}

HybridPolicy HybridPolicy::from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("mode") || !j["mode"].is_string())
    throw InvalidPolicy("policy needs a \"mode\" string");
  HybridPolicy p;
  const auto mode = j["mode"].get<std::string>();
  if (mode == "filter_agree")
    p.mode = HybridMode::FilterAgree;
  else if (mode == "ws_override")
    p.mode = HybridMode::WsOverride;
  else if (mode == "confidence_blend")
    p.mode = HybridMode::ConfidenceBlend;
  else
    throw InvalidPolicy("unknown hybrid mode \"" + mode + "\"");
  for (const char* key : {"ws_min_confidence", "blend_weight"})
    if (j.contains(key) && !j[key].is_number())
      throw InvalidPolicy(std::string(key) + " must be a number");
  p.ws_min_confidence = j.value("ws_min_confidence", p.ws_min_confidence);
  p.blend_weight = j.value("blend_weight", p.blend_weight);
  p.validate();
  return p;
}

nlohmann::ordered_json HybridPolicy::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(mode));
  j["ws_min_confidence"] = ws_min_confidence;
  j["blend_weight"] = blend_weight;
  return j;
}

Prediction hybrid_classify(const Query& q, const std::optional<Prediction>& llm, const WeakLabel& ws,
                           const HybridPolicy& policy) {
  policy.validate();
  if (!llm) return from_ws(q, ws);

  switch (policy.mode) {
    case HybridMode::FilterAgree:
      if (ws.defaulted || ws.label == llm->label) return from_llm(q, *llm);
      return ws.confidence >= policy.ws_min_confidence ? from_ws(q, ws) : from_llm(q, *llm);

    case HybridMode::WsOverride:
      return ws.defaulted ? from_llm(q, *llm) : from_ws(q, ws);

    case HybridMode::ConfidenceBlend: {
      // A defaulted weak label contributes its default confidence to its label.
      std::array<double, kNumLabels> ws_part = ws.vote_fractions();
      if (ws.defaulted) ws_part[index_of(ws.label)] = ws.confidence;
      std::array<double, kNumLabels> score{};
      double sum = 0.0;
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        score[k] = (1.0 - policy.blend_weight) * ws_part[k];
        if (index_of(llm->label) == k) score[k] += policy.blend_weight * llm->confidence;
        sum += score[k];
      }
      if (sum <= 0.0) return from_ws(q, ws);
      std::optional<IntentLabel> best;
      for (auto l : kTiePriority)
        if (!best || score[index_of(l)] > score[index_of(*best)]) best = l;
      const bool from_weak_only = *best != llm->label;
      return Prediction{q.id(), *best, score[index_of(*best)] / sum, Provenance::Hybrid,
                        from_weak_only && ws.defaulted};
    }
  }
  throw InvalidPolicy("unreachable hybrid mode");
}

}  // namespace qintent
