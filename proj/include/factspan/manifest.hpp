#pragma once

// Run manifests: every CLI output file gets a sibling
// <output>.manifest.json recording the command, resolved configuration and
// its hash, the seed, and content digests of all inputs and of the output
// itself. Reruns with identical commands and inputs produce identical
// output digests.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "factspan/config.hpp"
#include "factspan/error.hpp"
#include "factspan/rng.hpp"
#include "factspan/version.hpp"

namespace factspan {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for digest");
  }
  std::uint64_t h = 1469598103934665603ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    h = fnv1a64(std::string_view(buffer, static_cast<std::size_t>(in.gcount())), h);
    if (in.eof()) break;
  }
  return "fnv1a64:" + hex64(h);
}

inline std::string manifest_path(const std::string& output_path) {
  return output_path + ".manifest.json";
}

inline void write_manifest(const std::string& output_path,
                           const std::string& command,
                           const std::vector<std::string>& input_paths,
                           const Config& config, std::uint64_t seed) {
  nlohmann::json m;
  m["version"] = std::string(kToolName) + " " + kVersion;
  m["command"] = command;
  m["seed"] = seed;
  nlohmann::json cfg;
  for (const auto& [key, value] : config.resolved()) {
    cfg[key] = {{"value", value.first}, {"source", to_string(value.second)}};
  }
  m["config"] = std::move(cfg);
  m["config_hash"] = hex64(config.hash());
  nlohmann::json inputs;
  for (const std::string& path : input_paths) {
    inputs[path] = file_digest(path);
  }
  m["inputs"] = std::move(inputs);
  nlohmann::json output;
  output[output_path] = std::filesystem::exists(output_path)
                            ? file_digest(output_path)
                            : "missing";
  m["output"] = std::move(output);

  std::ofstream out(manifest_path(output_path), std::ios::trunc);
  if (!out) {
    throw IoError("cannot write manifest for '" + output_path + "'");
  }
  out << m.dump(2) << '\n';
}

}  // namespace factspan
