#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace sqa {

inline constexpr const char* kToolVersion = "1.0.0";

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::string hash;  // FNV-1a of the bytes, hex
};

// Everything needed to reproduce a run: the arguments it was started with
// and the hashes of what it wrote. No timestamps, so re-running a manifest
// yields an identical manifest.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;  // subcommand and its options, without global --out-dir
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  std::string instance_checksum;  // empty when the run has no instance
  int csv_schema = 0;
  std::vector<OutputRecord> outputs;
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::ordered_json& j);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

// Hashes each listed output under `dir` into m.outputs.
void record_outputs(RunManifest& m, const std::filesystem::path& dir, const std::vector<std::string>& files);

}  // namespace sqa
