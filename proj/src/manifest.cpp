#include "qintent/manifest.hpp"

#include <fstream>

#include "qintent/digest.hpp"
#include "qintent/errors.hpp"

namespace qintent {

void RunManifest::add_input(const std::filesystem::path& p) { inputs[p.string()] = sha256_file(p); }
void RunManifest::add_output(const std::filesystem::path& p) { outputs[p.string()] = sha256_file(p); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["tool_version"] = kToolVersion;
  j["config"] = config;
  j["seeds"] = seeds;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  if (!report.empty()) j["report"] = report;
  j["duration_seconds"] = duration_seconds;
  return j;
}

void RunManifest::write(const std::filesystem::path& p) const {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << to_json().dump(2) << '\n';
}

std::filesystem::path manifest_path_for(const std::filesystem::path& out) {
  if (std::filesystem::is_directory(out)) return out / "manifest.json";
  auto p = out;
  p += ".manifest.json";
  return p;
}

}  // namespace qintent
