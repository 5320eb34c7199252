#include "qintent/curation.hpp"

#include <cmath>

#include "qintent/pos_tagger.hpp"
#include "qintent/rng.hpp"

namespace qintent {

Example example_from_record(const Record& r) {
  if (!r.label) throw DataError("record \"" + r.query + "\" has no label");
  Example e{to_query(r), parse_label(*r.label), r.confidence.value_or(1.0),
            r.provenance ? parse_provenance(*r.provenance) : Provenance::Weak};
  if (!(e.confidence > 0.0 && e.confidence <= 1.0))
    throw DataError("confidence outside (0, 1] for \"" + e.query.text() + "\"");
  return e;
}

Record to_record(const Example& e) {
  Record r;
  r.id = e.query.id();
  r.query = e.query.text();
  r.label = std::string(to_string(e.label));
  r.confidence = e.confidence;
  r.provenance = std::string(to_string(e.provenance));
  return r;
}

Record to_finetune_record(const Example& e) {
  Record r;
  r.query = e.query.text();
  r.label = std::string(to_string(e.label));
  return r;
}

std::size_t StratifiedSample::total() const noexcept {
  return per_class[0].size() + per_class[1].size() + per_class[2].size();
}

std::vector<Example> StratifiedSample::flatten() const {
  std::vector<Example> out;
  out.reserve(total());
  for (const auto& c : per_class) out.insert(out.end(), c.begin(), c.end());
  return out;
}

StratifiedSample group_by_label(std::span<const Example> examples, std::string source) {
  StratifiedSample s;
  s.source = std::move(source);
  for (const auto& e : examples) s.per_class[index_of(e.label)].push_back(e);
  return s;
}

StratifiedReservoir::StratifiedReservoir(std::size_t n_per_class, std::uint64_t seed)
    : n_(n_per_class), seed_(seed) {
  if (n_per_class == 0) throw DataError("per-class count must be positive");
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    rngs_[c].seed(derive_seed(seed, c));
    slots_[c].reserve(n_per_class);
  }
}

void StratifiedReservoir::offer(const Example& e) {
  if (!ids_.insert(e.query.id()).second) {
    ++duplicates_;
    return;
  }
  const auto c = index_of(e.label);
  const auto i = seen_[c]++;
  if (i < n_) {
    slots_[c].push_back(e);
    return;
  }
  const auto j = uniform_below(rngs_[c], i + 1);
  if (j < n_) slots_[c][j] = e;
}

StratifiedSample StratifiedReservoir::finish(std::string source) && {
  for (auto l : kAllLabels)
    if (seen_[index_of(l)] < n_) throw InsufficientClass(l, seen_[index_of(l)], n_);
  StratifiedSample s;
  s.per_class = std::move(slots_);
  s.seed = seed_;
  s.source = std::move(source);
  return s;
}

StratifiedSample stratified_sample(std::span<const Example> corpus, std::size_t n_per_class,
                                   std::uint64_t seed, std::string source) {
  StratifiedReservoir r(n_per_class, seed);
  for (const auto& e : corpus) r.offer(e);
  return std::move(r).finish(std::move(source));
}

// ---------------------------------------------------------------------------

std::vector<std::string> WhitespaceTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for (auto t : qintent::tokenize(text)) out.emplace_back(t);
  return out;
}

std::string WhitespaceTokenizer::detokenize(std::span<const std::string> tokens) const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

Truncation truncate_tokens(const Query& q, std::size_t max_tokens, const Tokenizer& tok) {
  if (max_tokens == 0) throw DataError("max_tokens must be positive");
  auto tokens = tok.tokenize(q.text());
  Truncation t{q, false, tokens.size()};
  if (tokens.size() <= max_tokens) return t;
  tokens.resize(max_tokens);
  t.query = Query::make(tok.detokenize(tokens), q.id());
  t.truncated = true;
  return t;
}

// ---------------------------------------------------------------------------

void seeded_shuffle(std::vector<Example>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

TrainValSplit split_train_val(std::span<const Example> examples, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must be in (0, 1)");
  PerClass groups;
  for (const auto& e : examples) groups[index_of(e.label)].push_back(e);

  TrainValSplit out;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    auto& g = groups[c];
    seeded_shuffle(g, derive_seed(seed, 16 + c));
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(g.size())));
    out.train.insert(out.train.end(), g.begin(), g.begin() + n_train);
    out.validation.insert(out.validation.end(), g.begin() + n_train, g.end());
  }
  seeded_shuffle(out.train, derive_seed(seed, 32));
  seeded_shuffle(out.validation, derive_seed(seed, 33));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Example> HighConfidenceSelection::flatten() const {
  std::vector<Example> out;
  for (const auto& c : per_class) out.insert(out.end(), c.begin(), c.end());
  return out;
}

HighConfidenceSelection select_high_confidence(std::span<const Example> preds, double threshold,
                                               std::size_t n_per_class, std::uint64_t seed,
                                               const StringSet& exclude) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw DataError("threshold must be in (0, 1)");
  HighConfidenceSelection sel;
  sel.threshold = threshold;
  StratifiedReservoir r(n_per_class, seed);
  for (const auto& p : preds) {
    if (p.confidence < threshold) continue;
    if (exclude.contains(p.query.id())) {
      ++sel.excluded;
      continue;
    }
    r.offer(p);
  }
  for (auto l : kAllLabels) sel.eligible[index_of(l)] = r.seen(l);
  sel.per_class = std::move(r).finish().per_class;
  return sel;
}

AugmentedSet assemble_augmented(StratifiedSample random, PerClass high_conf, double threshold,
                                std::uint64_t seed) {
  StringSet ids;
  for (const auto& c : random.per_class)
    for (const auto& e : c)
      if (!ids.insert(e.query.id()).second) throw OverlapDetected(e.query.id());
  for (const auto& c : high_conf)
    for (const auto& e : c) {
      if (!ids.insert(e.query.id()).second) throw OverlapDetected(e.query.id());
      if (e.confidence < threshold)
        throw DataError("high-confidence example \"" + e.query.id() + "\" has confidence " +
                        std::to_string(e.confidence) + " below the threshold");
    }

  AugmentedSet out;
  out.records = random.flatten();
  for (const auto& c : high_conf) out.records.insert(out.records.end(), c.begin(), c.end());
  seeded_shuffle(out.records, seed);
  out.random_part = std::move(random);
  out.high_conf_part = std::move(high_conf);
  out.threshold = threshold;
  return out;
}

}  // namespace qintent
