#pragma once

#include <array>
#include <cstdint>

#include "qintent/evaluation.hpp"

namespace qintent::detail {

/// Sufficient statistics for macro P/R/F1.
struct Counts {
  std::array<std::uint32_t, kNumLabels> tp{};
  std::array<std::uint32_t, kNumLabels> predicted{};
  std::array<std::uint32_t, kNumLabels> gold{};
};

inline double precision(const Counts& c, std::size_t k) noexcept {
  return c.predicted[k] ? static_cast<double>(c.tp[k]) / c.predicted[k] : 0.0;
}
inline double recall(const Counts& c, std::size_t k) noexcept {
  return c.gold[k] ? static_cast<double>(c.tp[k]) / c.gold[k] : 0.0;
}
inline double f1(double p, double r) noexcept { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline double macro(const Counts& c, Metric m) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    switch (m) {
      case Metric::Precision:
        sum += precision(c, k);
        break;
      case Metric::Recall:
        sum += recall(c, k);
        break;
      case Metric::F1:
        sum += f1(precision(c, k), recall(c, k));
        break;
    }
  }
  return sum / kNumLabels;
}

}  // namespace qintent::detail
