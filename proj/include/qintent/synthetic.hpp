#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qintent/query.hpp"

namespace qintent {

struct SyntheticQuery {
  std::string id;
  std::string text;
  IntentLabel intent;  // the template's intent, not a classifier output
};

/// Template-generated short queries, classes in round-robin order.
/// Deterministic in (n, seed). Texts may repeat; ids never do.
std::vector<SyntheticQuery> synthetic_queries(std::size_t n, std::uint64_t seed);

}  // namespace qintent
