#include "sqa/manifest.hpp"

#include <fstream>
#include <sstream>

#include "sqa/error.hpp"
#include "sqa/io.hpp"

namespace sqa {

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "sqa";
  j["version"] = m.version;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["seed"] = m.seed;
  j["params"] = m.params;
  j["instance_checksum"] = m.instance_checksum;
  j["csv_schema"] = m.csv_schema;
  auto outs = nlohmann::ordered_json::array();
  for (const auto& o : m.outputs) outs.push_back({{"path", o.path}, {"fnv1a64", o.hash}});
  j["outputs"] = outs;
  return j;
}

RunManifest manifest_from_json(const nlohmann::ordered_json& j) {
  try {
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.params = j.at("params");
    m.instance_checksum = j.at("instance_checksum").get<std::string>();
    m.csv_schema = j.at("csv_schema").get<int>();
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("fnv1a64").get<std::string>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  return manifest_from_json(j);
}

void record_outputs(RunManifest& m, const std::filesystem::path& dir, const std::vector<std::string>& files) {
  for (const auto& f : files) m.outputs.push_back({f, io::hex64(io::file_hash(dir / f))});
}

}  // namespace sqa
