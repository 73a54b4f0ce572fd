#include "run_manifest.hpp"

#include <algorithm>

#include <json.hpp>

#include "signforge/format.hpp"
#include "signforge/version.hpp"

namespace signforge::cli {

namespace fs = std::filesystem;

bool volatile_file(const fs::path& p) {
  const auto name = p.filename();
  return name == "manifest.json" || name == "timing.jsonl";
}

std::string digest_path(const fs::path& p) {
  if (!fs::is_directory(p)) return hex_digest(read_file(p));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file() && !volatile_file(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string joined;
  for (const auto& f : files) {
    joined += fs::relative(f, p).generic_string();
    joined += '\t';
    joined += hex_digest(read_file(f));
    joined += '\n';
  }
  return hex_digest(joined);
}

void write_manifest(const fs::path& where, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "signforge";
  j["version"] = std::string(kVersion);
  j["command"] = m.command;
  j["args"] = m.args;
  j["seed"] = m.seed;
  if (m.config) {
    j["config_hash"] = config_hash(*m.config);
    j["config"] = nlohmann::ordered_json::parse(to_json(*m.config));
  }
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& p : m.inputs) inputs[p.generic_string()] = digest_path(p);
  j["inputs"] = inputs;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& p : m.outputs) outputs[p.generic_string()] = digest_path(p);
  j["outputs"] = outputs;
  write_file(where, j.dump(2) + "\n");
}

}  // namespace signforge::cli
