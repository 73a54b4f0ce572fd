#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "signforge/ingest.hpp"
#include "signforge/lift3d.hpp"
#include "signforge/pipeline.hpp"
#include "signforge/signmodel.hpp"
#include "signforge/synth.hpp"
#include "signforge/training.hpp"

namespace signforge {

enum class TrainMode { Mlsf, P2lg };

TrainMode parse_train_mode(std::string_view s);
std::string_view to_string(TrainMode m);

// Everything a run needs, as one JSON document:
//   { "seed", "model": {...}, "vocab": {...}, "training": {...},
//     "lift": {...}, "clean": {...}, "synth": {...}, "paths": {...} }
// Missing keys keep their defaults; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  ModelConfig model;
  VocabOptions vocab{16000, true};
  RLConfig training;
  TrainMode mode = TrainMode::Mlsf;
  std::vector<std::string> languages;  // empty = every language in the data
  std::size_t eval_every = 0;          // 0 = no per-epoch DTW
  LiftParams lift;
  CleanPolicy clean;
  SynthSpec synth;
  std::map<std::string, std::string> paths;

  RunConfig();
};

// Throws BadConfig naming the offending key or rule.
RunConfig parse_run_config(std::string_view json_text);
void validate(const RunConfig& c);

// Canonical JSON (fixed key order, every field present).
std::string to_json(const RunConfig& c);
std::string config_hash(const RunConfig& c);

std::string model_config_json(const ModelConfig& c);
ModelConfig parse_model_config(std::string_view json_text);

}  // namespace signforge
