#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signforge/config.hpp"

namespace signforge::cli {

// Provenance record written beside every output.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> args;  // flags that affect outputs
  std::optional<RunConfig> config;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

// Files left out of directory digests: manifests and wall-clock timings.
bool volatile_file(const std::filesystem::path& p);

// Digest of a file, or of every non-volatile file under a directory.
std::string digest_path(const std::filesystem::path& p);

void write_manifest(const std::filesystem::path& where, const RunManifest& m);

}  // namespace signforge::cli
