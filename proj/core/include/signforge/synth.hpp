#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signforge/prompts.hpp"
#include "signforge/storage.hpp"

namespace signforge {

inline constexpr std::size_t kMotifFrames = 8;

struct SynthSpec {
  std::vector<std::string> languages{"ASL", "GSL"};
  std::size_t vocab_per_language = 6;
  std::size_t clips = 50;  // per language
  std::size_t min_frames = 8;
  std::size_t max_frames = 24;
  double motif_amplitude = 1.0;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument.
void validate(const SynthSpec& s);

struct SynthClip {
  std::string id;
  std::string language;
  std::string transcript;
  std::vector<std::string> gloss;  // uppercase transcript tokens
  std::string prompt;
  std::vector<float> pose;         // T x 150
};

struct SynthCorpus {
  SynthSpec spec;
  std::vector<SynthClip> clips;
  std::map<std::string, std::vector<std::string>> lexicon;  // language -> words
  // "<language> <word>" -> 8 x 150 motif
  std::map<std::string, std::vector<float>> motifs;
  double min_separation = 0.0;
};

// Motif of one token: A * (0.8 u_c + 0.2 sin(2 pi f / 8 + phi_c)) with u and
// phi drawn from a generator seeded by (seed, language, word).
std::vector<float> token_motif(std::string_view language, std::string_view word,
                               std::uint64_t seed, double amplitude);

SynthCorpus generate(const SynthSpec& spec);

// Minimum pairwise Euclidean distance between motifs; with a single motif,
// twice its distance from the zero pose.
double motif_separation(const std::map<std::string, std::vector<float>>& motifs);

std::vector<PoseClip> pose_clips(const SynthCorpus& c);
std::vector<TranscriptItem> transcripts(const SynthCorpus& c);
std::vector<PromptItem> prompt_items(const SynthCorpus& c);

// Nearest-motif pose -> text decoder. A pose of T' frames is read as
// round(T' / 8) chunks; a chunk farther than half the minimum motif
// separation from every motif reads as "<unk>".
class ReverseOracle {
 public:
  explicit ReverseOracle(const SynthCorpus& corpus);

  std::vector<std::string> decode(std::span<const float> pose,
                                  std::optional<std::string_view> language = std::nullopt) const;
  double tolerance() const noexcept { return tolerance_; }

 private:
  struct Entry {
    std::string language;
    std::string word;
    std::vector<float> motif;
  };
  std::vector<Entry> entries_;
  double tolerance_ = 0.0;
};

}  // namespace signforge
