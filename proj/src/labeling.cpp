#include "qintent/labeling.hpp"

#include <algorithm>

#include "qintent/assets.hpp"

namespace qintent {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"keyword_set", "pattern", "pos_rule",
                                                        "length_heuristic"};
constexpr std::array<std::string_view, 3> kPositionNames = {"first", "last", "any"};

LfKind parse_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (s == kKindNames[i]) return static_cast<LfKind>(i);
  throw DataError("unknown labeling function kind \"" + std::string(s) + "\"");
}

TokenPosition parse_position(std::string_view s) {
  for (std::size_t i = 0; i < kPositionNames.size(); ++i)
    if (s == kPositionNames[i]) return static_cast<TokenPosition>(i);
  throw DataError("unknown token position \"" + std::string(s) + "\"");
}

std::shared_ptr<const std::regex> compile(const std::string& source, const std::string& owner) {
  try {
    return std::make_shared<const std::regex>(source,
                                              std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw DataError("labeling function \"" + owner + "\": bad pattern: " + e.what());
  }
}

template <class T>
T required(const ordered_json& j, const char* key, const std::string& owner) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError("labeling function \"" + owner + "\" lacks \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError("labeling function \"" + owner + "\": field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

std::string_view to_string(LfKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

LabelingFunction LabelingFunction::keyword_set(std::string name, IntentLabel target,
                                               std::vector<std::string> keywords) {
  Keywords kw;
  for (const auto& k : keywords) {
    std::string norm = normalize(k);
    auto toks = tokenize(norm);
    if (toks.size() == 1)
      kw.single.emplace(norm);
    else
      kw.phrases.emplace_back(toks.begin(), toks.end());
  }
  kw.listed = std::move(keywords);
  return LabelingFunction(std::move(name), LfKind::KeywordSet, target, std::move(kw));
}

LabelingFunction LabelingFunction::pattern(std::string name, IntentLabel target, std::string regex) {
  auto re = compile(regex, name);
  return LabelingFunction(std::move(name), LfKind::Pattern, target,
                          Pattern{std::move(regex), std::move(re)});
}

LabelingFunction LabelingFunction::pos_rule(std::string name, IntentLabel target, PosTag tag,
                                            TokenPosition position) {
  return LabelingFunction(std::move(name), LfKind::PosRule, target, PosRule{tag, position});
}

LabelingFunction LabelingFunction::length_heuristic(std::string name, IntentLabel target,
                                                    std::size_t min_tokens,
                                                    std::optional<std::string> exclude_regex) {
  if (min_tokens == 0) throw DataError("labeling function \"" + name + "\": min_tokens must be >= 1");
  std::shared_ptr<const std::regex> re;
  if (exclude_regex) re = compile(*exclude_regex, name);
  return LabelingFunction(std::move(name), LfKind::LengthHeuristic, target,
                          Length{min_tokens, std::move(exclude_regex), std::move(re)});
}

LabelingFunction LabelingFunction::from_json(const ordered_json& j) {
  if (!j.is_object()) throw DataError("labeling function entry must be an object");
  auto name = required<std::string>(j, "name", "<unnamed>");
  if (name.empty()) throw DataError("labeling function name must not be empty");
  const auto kind = parse_kind(required<std::string>(j, "kind", name));
  const auto target = parse_label(required<std::string>(j, "target", name));
  switch (kind) {
    case LfKind::KeywordSet: {
      auto kws = required<std::vector<std::string>>(j, "keywords", name);
      if (kws.empty()) throw DataError("labeling function \"" + name + "\" has no keywords");
      return keyword_set(std::move(name), target, std::move(kws));
    }
    case LfKind::Pattern:
      return pattern(name, target, required<std::string>(j, "pattern", name));
    case LfKind::PosRule: {
      const auto tag = parse_pos_tag(required<std::string>(j, "tag", name));
      const auto pos = j.contains("position")
                           ? parse_position(required<std::string>(j, "position", name))
                           : TokenPosition::First;
      return pos_rule(std::move(name), target, tag, pos);
    }
    case LfKind::LengthHeuristic: {
      const auto min_tokens = required<std::size_t>(j, "min_tokens", name);
      std::optional<std::string> exclude;
      if (j.contains("exclude_pattern")) exclude = required<std::string>(j, "exclude_pattern", name);
      return length_heuristic(std::move(name), target, min_tokens, std::move(exclude));
    }
  }
  throw DataError("unreachable labeling function kind");
}

ordered_json LabelingFunction::to_json() const {
  ordered_json j;
  j["name"] = name_;
  j["kind"] = std::string(to_string(kind_));
  j["target"] = std::string(to_string(target_));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Keywords>) {
          j["keywords"] = p.listed;
        } else if constexpr (std::is_same_v<T, Pattern>) {
          j["pattern"] = p.source;
        } else if constexpr (std::is_same_v<T, PosRule>) {
          j["tag"] = std::string(to_string(p.tag));
          j["position"] = std::string(kPositionNames[static_cast<std::size_t>(p.position)]);
        } else {
          j["min_tokens"] = p.min_tokens;
          if (p.exclude_source) j["exclude_pattern"] = *p.exclude_source;
        }
      },
      params_);
  return j;
}

bool LabelingFunction::fires(std::string_view text, std::span<const TaggedToken> tokens) const {
  return std::visit(
      [&](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Keywords>) {
          for (const auto& t : tokens)
            if (p.single.contains(t.token)) return true;
          for (const auto& phrase : p.phrases) {
            if (phrase.size() > tokens.size()) continue;
            for (std::size_t s = 0; s + phrase.size() <= tokens.size(); ++s) {
              bool all = true;
              for (std::size_t k = 0; k < phrase.size() && all; ++k)
                all = tokens[s + k].token == phrase[k];
              if (all) return true;
            }
          }
          return false;
        } else if constexpr (std::is_same_v<T, Pattern>) {
          return std::regex_search(text.begin(), text.end(), *p.re);
        } else if constexpr (std::is_same_v<T, PosRule>) {
          if (tokens.empty()) return false;
          switch (p.position) {
            case TokenPosition::First:
              return tokens.front().tag == p.tag;
            case TokenPosition::Last:
              return tokens.back().tag == p.tag;
            case TokenPosition::Any:
              return std::any_of(tokens.begin(), tokens.end(),
                                 [&](const TaggedToken& t) { return t.tag == p.tag; });
          }
          return false;
        } else {
          if (tokens.size() < p.min_tokens) return false;
          return !(p.exclude && std::regex_search(text.begin(), text.end(), *p.exclude));
        }
      },
      params_);
}

LabelVote LabelingFunction::apply(const Query& q, std::span<const TaggedToken> tokens) const {
  LabelVote v{std::nullopt, name_};
  if (fires(q.text(), tokens)) v.label = target_;
  return v;
}

// ---------------------------------------------------------------------------

const FunctionSet& FunctionSet::builtin() {
  static const FunctionSet fs =
      from_json(ordered_json::parse(assets::get("functions.json")));
  return fs;
}

FunctionSet FunctionSet::from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("functions") || !j["functions"].is_array())
    throw DataError("function set config needs a \"functions\" array");
  FunctionSet fs;
  IntentLabel def = IntentLabel::Informational;
  double conf = kDefaultConfidence;
  if (auto it = j.find("default_label"); it != j.end()) def = parse_label(it->get<std::string>());
  if (auto it = j.find("default_confidence"); it != j.end()) {
    if (!it->is_number()) throw DataError("default_confidence must be a number");
    conf = it->get<double>();
  }
  fs.set_default(def, conf);
  for (const auto& f : j["functions"]) fs.add(LabelingFunction::from_json(f));
  return fs;
}

FunctionSet FunctionSet::load(const std::string& path) {
  const auto text = assets::load_text(path);
  auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError(path + ": malformed JSON");
  return from_json(j);
}

ordered_json FunctionSet::to_json() const {
  ordered_json j;
  j["version"] = 1;
  j["default_label"] = std::string(to_string(default_label_));
  j["default_confidence"] = default_confidence_;
  j["functions"] = ordered_json::array();
  for (const auto& f : functions_) j["functions"].push_back(f.to_json());
  return j;
}

void FunctionSet::add(LabelingFunction lf) {
  if (find(lf.name())) throw DataError("duplicate labeling function name \"" + lf.name() + "\"");
  functions_.push_back(std::move(lf));
}

const LabelingFunction* FunctionSet::find(std::string_view name) const noexcept {
  for (const auto& f : functions_)
    if (f.name() == name) return &f;
  return nullptr;
}

void FunctionSet::set_default(IntentLabel label, double confidence) {
  if (!(confidence > 0.0 && confidence <= 1.0))
    throw DataError("default_confidence must be in (0, 1]");
  default_label_ = label;
  default_confidence_ = confidence;
}

// ---------------------------------------------------------------------------

std::array<double, kNumLabels> WeakLabel::vote_fractions() const noexcept {
  std::array<double, kNumLabels> f{};
  const auto n = non_abstain();
  if (n == 0) return f;
  for (std::size_t i = 0; i < kNumLabels; ++i) f[i] = static_cast<double>(tally[i]) / n;
  return f;
}

WeakLabel aggregate(std::vector<LabelVote> votes, const FunctionSet& fs) {
  WeakLabel w;
  for (const auto& v : votes)
    if (v.label) ++w.tally[index_of(*v.label)];
  w.votes = std::move(votes);

  const auto total = w.non_abstain();
  if (total == 0) {
    w.defaulted = true;
    w.label = fs.default_label();
    w.confidence = fs.default_confidence();
    return w;
  }
  const auto top = *std::max_element(w.tally.begin(), w.tally.end());
  int at_top = 0;
  for (auto c : w.tally) at_top += (c == top);
  w.tie_broken = at_top > 1;
  for (auto l : kTiePriority) {
    if (w.tally[index_of(l)] == top) {
      w.label = l;
      break;
    }
  }
  w.confidence = static_cast<double>(top) / total;
  return w;
}

WeakLabel label(const Query& q, const FunctionSet& fs, const PosTagger& tagger) {
  const auto tokens = tagger.tag(q.text());
  std::vector<LabelVote> votes;
  votes.reserve(fs.size());
  for (const auto& f : fs.functions()) votes.push_back(f.apply(q, tokens));
  return aggregate(std::move(votes), fs);
}

WeakLabel label(const Query& q, const FunctionSet& fs) {
  static const PosTagger tagger;
  return label(q, fs, tagger);
}

Record to_record(const Query& q, const WeakLabel& w, bool with_votes) {
  Record r;
  r.id = q.id();
  r.query = q.text();
  r.label = std::string(to_string(w.label));
  r.confidence = w.confidence;
  r.provenance = std::string(to_string(Provenance::Weak));
  r.extra["defaulted"] = w.defaulted;
  r.extra["tie_broken"] = w.tie_broken;
  if (with_votes) {
    ordered_json votes = ordered_json::object();
    for (const auto& v : w.votes)
      votes[v.source] = v.label ? std::string(to_string(*v.label)) : std::string("abstain");
    r.extra["votes"] = std::move(votes);
  }
  return r;
}

WeakLabel weak_label_from_record(const Record& r) {
  auto it = r.extra.find("votes");
  if (it == r.extra.end() || !it->is_object())
    throw DataError("weak label record lacks a \"votes\" object");
  if (!r.label || !r.confidence) throw DataError("weak label record needs label and confidence");
  WeakLabel w;
  w.label = parse_label(*r.label);
  w.confidence = *r.confidence;
  for (auto v = it->begin(); v != it->end(); ++v) {
    if (!v->is_string()) throw DataError("vote for \"" + v.key() + "\" must be a string");
    const auto s = v->get<std::string>();
    LabelVote vote{std::nullopt, v.key()};
    if (s != "abstain") {
      vote.label = parse_label(s);
      ++w.tally[index_of(*vote.label)];
    }
    w.votes.push_back(std::move(vote));
  }
  if (auto d = r.extra.find("defaulted"); d != r.extra.end() && d->is_boolean())
    w.defaulted = d->get<bool>();
  else
    w.defaulted = w.non_abstain() == 0;
  if (auto t = r.extra.find("tie_broken"); t != r.extra.end() && t->is_boolean())
    w.tie_broken = t->get<bool>();
  if (!(w.confidence > 0.0 && w.confidence <= 1.0))
    throw DataError("weak label confidence outside (0, 1]");
  return w;
}

Prediction to_prediction(const Query& q, const WeakLabel& w) {
  return Prediction{q.id(), w.label, w.confidence, Provenance::Weak, w.defaulted};
}

}  // namespace qintent
