#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace qintent {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// unordered_set<string> that accepts string_view lookups without copying.
using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

}  // namespace qintent
