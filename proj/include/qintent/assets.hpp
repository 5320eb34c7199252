#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qintent::assets {

/// Files under data/ compiled into the library, keyed by relative path
/// (e.g. "lexicon/verbs.txt").
const std::map<std::string_view, std::string_view>& table();

/// Throws DataError for unknown names.
std::string_view get(std::string_view name);

/// Reads `path` from disk, or the embedded copy when `path` starts with
/// "builtin:".
std::string load_text(const std::string& path);

/// One entry per line; blank lines and '#' comments dropped, entries trimmed.
std::vector<std::string> word_list(std::string_view text);

}  // namespace qintent::assets
