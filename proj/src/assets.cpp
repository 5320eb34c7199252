#include "qintent/assets.hpp"

#include <fstream>
#include <sstream>

#include "qintent/errors.hpp"

namespace qintent::assets {

std::string_view get(std::string_view name) {
  const auto& t = table();
  auto it = t.find(name);
  if (it == t.end()) throw DataError("no builtin asset \"" + std::string(name) + "\"");
  return it->second;
}

std::string load_text(const std::string& path) {
  constexpr std::string_view kPrefix = "builtin:";
  if (path.starts_with(kPrefix)) return std::string(get(std::string_view(path).substr(kPrefix.size())));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> word_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.remove_suffix(1);
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

}  // namespace qintent::assets
