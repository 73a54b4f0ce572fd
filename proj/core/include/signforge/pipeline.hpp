#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "signforge/corpus.hpp"
#include "signforge/metrics.hpp"
#include "signforge/signmodel.hpp"
#include "signforge/synth.hpp"
#include "signforge/training.hpp"

namespace signforge {

// Per-language transcript -> pose pairs.
struct MlsfModel {
  ModelConfig config;
  std::map<std::string, Vocab> vocabs;
  LanguageRegistry registry;
};

struct VocabOptions {
  std::size_t max_size = 512;
  bool case_sensitive = false;
};

MlsfModel build_mlsf(const Corpus& corpus, const ModelConfig& config, const VocabOptions& vocab,
                     std::uint64_t seed);
Prompt2LangGlossModel build_p2lg(const Corpus& corpus, const ModelConfig& config,
                                 const VocabOptions& vocab, const LanguageTags& tags,
                                 std::uint64_t seed);

std::vector<float> generate_mlsf(const MlsfModel& model, std::string_view language,
                                 std::string_view text);
Prompt2LangGlossResult generate_p2lg(const Prompt2LangGlossModel& model, std::string_view language,
                                     std::string_view prompt, const LanguageTags& tags);

ScoreReport evaluate_mlsf(const MlsfModel& model, const Corpus& corpus, const PoseReader& reverse,
                          std::size_t jobs = 1);
ScoreReport evaluate_p2lg(const Prompt2LangGlossModel& model, const Corpus& corpus,
                          const PoseReader& reverse, const LanguageTags& tags, std::size_t jobs = 1);

// Mean normalized DTW of generated vs. reference poses.
double mean_dtw(const Corpus& corpus, const std::function<std::vector<float>(const CorpusItem&)>& gen,
                std::size_t jobs = 1);

// One trained stage: a language pair (mlsf) or "gloss_stage"/"pose_stage".
struct StageLog {
  std::string stage;
  TrainLog log;
};

// Trains every registered language in tag order. Each stage uses a seed
// derived from (config.seed, stage name). With eval_every > 0, dtw_dev is
// the mean DTW of generated vs. reference poses every eval_every epochs.
std::vector<StageLog> train_mlsf(MlsfModel& model, const Corpus& corpus, const RLConfig& config,
                                 std::size_t eval_every = 0);
// Gloss stage first, then pose stage (fed gold LangGloss during training).
std::vector<StageLog> train_p2lg(Prompt2LangGlossModel& model, const Corpus& corpus,
                                 const RLConfig& config, const LanguageTags& tags,
                                 std::size_t eval_every = 0);

// Reverse model built from the synthetic motifs, stored as an archive with
// one "<language> <word>" entry per motif.
std::string serialize_motifs(const SynthCorpus& corpus);
SynthCorpus motifs_from_archive(std::string_view bytes);

// Checkpoint directory layout:
//   manifest.json  mode, model config, languages, file map
//   <LANG>.sfca / <LANG>.vocab             (mlsf)
//   gloss_stage.sfca, pose_stage.sfca,
//   prompt.vocab, gloss.vocab              (p2lg)
void save_mlsf(const MlsfModel& model, const std::filesystem::path& dir);
MlsfModel load_mlsf(const std::filesystem::path& dir);
void save_p2lg(const Prompt2LangGlossModel& model, const std::filesystem::path& dir);
Prompt2LangGlossModel load_p2lg(const std::filesystem::path& dir);
// "mlsf" or "p2lg" from the directory's manifest.
std::string checkpoint_mode(const std::filesystem::path& dir);

}  // namespace signforge
