#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace qintent {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written next to every output. Rerunning with the
/// same config, seeds and inputs reproduces the outputs byte for byte; only
/// duration_seconds differs.
struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();   // path -> sha256
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();  // path -> sha256
  nlohmann::ordered_json report = nlohmann::ordered_json::object();
  double duration_seconds = 0.0;

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& p) const;
};

/// `<dir>/manifest.json` for directory outputs, `<file>.manifest.json` otherwise.
std::filesystem::path manifest_path_for(const std::filesystem::path& out);

}  // namespace qintent
