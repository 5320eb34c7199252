#include <omp.h>

#include <cmath>

#include "metric_counts.hpp"
#include "qintent/evaluation.hpp"
#include "qintent/rng.hpp"

namespace qintent {

namespace {

constexpr std::int8_t kNull = -1;
// Slack on the >= comparison so that statistics equal up to rounding count
// as ties.
constexpr double kTieSlack = 1e-12;

struct Encoded {
  std::vector<std::int8_t> a, b;
  std::vector<std::uint8_t> gold;
};

Encoded encode(std::span<const std::optional<IntentLabel>> a,
               std::span<const std::optional<IntentLabel>> b, std::span<const IntentLabel> gold) {
  if (a.size() != gold.size() || b.size() != gold.size())
    throw MisalignedInputs("systems and gold must have the same length (" +
                           std::to_string(a.size()) + ", " + std::to_string(b.size()) + ", " +
                           std::to_string(gold.size()) + ")");
  if (gold.empty()) throw EmptyGold();
  Encoded e;
  e.a.reserve(a.size());
  e.b.reserve(b.size());
  e.gold.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    e.a.push_back(a[i] ? static_cast<std::int8_t>(index_of(*a[i])) : kNull);
    e.b.push_back(b[i] ? static_cast<std::int8_t>(index_of(*b[i])) : kNull);
    e.gold.push_back(static_cast<std::uint8_t>(index_of(gold[i])));
  }
  return e;
}

inline void tally(detail::Counts& c, std::int8_t pred, std::uint8_t gold) noexcept {
  if (pred == kNull) return;
  ++c.predicted[pred];
  c.tp[pred] += static_cast<std::uint8_t>(pred) == gold;
}

/// metric(a') - metric(b') where query i is swapped when bit i of the
/// iteration's stream is set. Iteration -1 means no swaps (observed).
double statistic(const Encoded& e, const detail::Counts& gold_counts, Metric m, std::uint64_t seed,
                 std::int64_t iteration) {
  detail::Counts ca = gold_counts, cb = gold_counts;
  const std::size_t n = e.gold.size();
  const std::uint64_t stream = iteration < 0 ? 0 : derive_seed(seed, static_cast<std::uint64_t>(iteration));
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (iteration >= 0 && (i & 63) == 0) bits = mix64(stream + (i >> 6));
    const bool swap = iteration >= 0 && ((bits >> (i & 63)) & 1ULL);
    const auto x = swap ? e.b[i] : e.a[i];
    const auto y = swap ? e.a[i] : e.b[i];
    tally(ca, x, e.gold[i]);
    tally(cb, y, e.gold[i]);
  }
  return detail::macro(ca, m) - detail::macro(cb, m);
}

detail::Counts gold_only(const Encoded& e) {
  detail::Counts c;
  for (auto g : e.gold) ++c.gold[g];
  return c;
}

SignificanceResult finish(Metric metric, double observed, std::int64_t at_least, const PermutationOptions& opts) {
  SignificanceResult r;
  r.metric = metric;
  r.observed = observed;
  r.iterations = opts.iterations;
  r.seed = opts.seed;
  r.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + opts.iterations);
  r.family_size = opts.family_size;
  r.corrected_alpha = bonferroni_alpha(opts.family_size, opts.alpha);
  r.significant = r.p_value < r.corrected_alpha;
  r.direction = observed > 0.0 ? Direction::Better : observed < 0.0 ? Direction::Worse : Direction::Same;
  return r;
}

void check(const PermutationOptions& opts) {
  if (opts.iterations < 1) throw DataError("iterations must be >= 1");
  if (opts.workers < 1) throw DataError("workers must be >= 1");
}

}  // namespace

SignificanceResult paired_permutation_test_serial(std::span<const std::optional<IntentLabel>> a,
                                                  std::span<const std::optional<IntentLabel>> b,
                                                  std::span<const IntentLabel> gold, Metric metric,
                                                  const PermutationOptions& opts) {
  check(opts);
  const auto e = encode(a, b, gold);
  const auto g = gold_only(e);
  const double observed = statistic(e, g, metric, opts.seed, -1);
  const double bar = std::abs(observed) - kTieSlack;
  std::int64_t at_least = 0;
  for (std::int64_t it = 0; it < opts.iterations; ++it)
    at_least += std::abs(statistic(e, g, metric, opts.seed, it)) >= bar;
  return finish(metric, observed, at_least, opts);
}

SignificanceResult paired_permutation_test(std::span<const std::optional<IntentLabel>> a,
                                           std::span<const std::optional<IntentLabel>> b,
                                           std::span<const IntentLabel> gold, Metric metric,
                                           const PermutationOptions& opts) {
  check(opts);
  const auto e = encode(a, b, gold);
  const auto g = gold_only(e);
  const double observed = statistic(e, g, metric, opts.seed, -1);
  const double bar = std::abs(observed) - kTieSlack;
  std::int64_t at_least = 0;
  const std::int64_t iters = opts.iterations;
#pragma omp parallel for schedule(static) reduction(+ : at_least) num_threads(opts.workers)
  for (std::int64_t it = 0; it < iters; ++it)
    at_least += std::abs(statistic(e, g, metric, opts.seed, it)) >= bar;
  return finish(metric, observed, at_least, opts);
}

}  // namespace qintent
