#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signforge/langgloss.hpp"
#include "signforge/language.hpp"
#include "signforge/metrics.hpp"
#include "signforge/synth.hpp"
#include "signforge/training.hpp"

namespace signforge {

// One joined training record: text side plus its pose.
struct CorpusItem {
  std::string id;
  std::string language;
  std::string transcript;
  std::vector<std::string> gloss;
  std::string prompt;
  std::vector<float> pose;  // T x 150
};

using Corpus = std::vector<CorpusItem>;

Corpus from_synth(const SynthCorpus& synth);

// Gloss TSV: "id\tlanguage\tGLOSS GLOSS ...".
struct GlossItem {
  std::string id;
  std::string language;
  std::vector<std::string> gloss;
};
std::string serialize_gloss(const std::vector<GlossItem>& items);
std::vector<GlossItem> parse_gloss(std::string_view tsv);

// Joins clips with transcripts (required) and prompts/gloss (optional) by
// id. A missing gloss defaults to the uppercase transcript tokens.
// Throws MalformedDocument when a clip has no transcript.
Corpus join_corpus(const std::vector<PoseClip>& clips, const std::vector<TranscriptItem>& transcripts,
                   const std::vector<PromptItem>& prompts, const std::vector<GlossItem>& gloss);

std::vector<std::string> languages_of(const Corpus& c);
Corpus filter_language(const Corpus& c, std::string_view language);

// Text side of the MLSF pose stage.
Vocab transcript_vocab(const Corpus& c, std::size_t max_size, bool case_sensitive);
std::vector<TrainSample> transcript_pose_samples(const Corpus& c, const Vocab& vocab);

// Prompt2LangGloss stages.
std::vector<std::string> item_langgloss(const CorpusItem& item, const LanguageTags& tags);
Vocab prompt_vocab(const Corpus& c, std::size_t max_size, bool case_sensitive);
Vocab langgloss_vocab(const Corpus& c, std::size_t max_size, const LanguageTags& tags);
std::vector<TrainSample> prompt_gloss_samples(const Corpus& c, const Vocab& prompts,
                                              const Vocab& gloss, const LanguageTags& tags);
std::vector<TrainSample> gloss_pose_samples(const Corpus& c, const Vocab& gloss,
                                            const LanguageTags& tags);

std::vector<EvalItem> eval_items(const Corpus& c, bool case_sensitive);

}  // namespace signforge
