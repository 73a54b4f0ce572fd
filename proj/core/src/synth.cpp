#include "signforge/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "signforge/error.hpp"
#include "signforge/parallel.hpp"

namespace signforge {

void validate(const SynthSpec& s) {
  if (s.languages.empty()) fail(ErrorCode::InvalidArgument, "synth needs at least one language");
  if (s.vocab_per_language == 0) fail(ErrorCode::InvalidArgument, "vocab_per_language must be >= 1");
  if (s.clips == 0) fail(ErrorCode::InvalidArgument, "clips must be >= 1");
  if (s.min_frames < kMotifFrames || s.max_frames < s.min_frames)
    fail(ErrorCode::InvalidArgument, "frame range must satisfy 8 <= min_frames <= max_frames");
  if (!(s.motif_amplitude > 0.0) || !std::isfinite(s.motif_amplitude))
    fail(ErrorCode::InvalidArgument, "motif_amplitude must be positive");
  std::set<std::string> seen;
  for (const auto& l : s.languages)
    if (!seen.insert(l).second) fail(ErrorCode::DuplicateTag, "language '" + l + "' listed twice");
}

std::vector<float> token_motif(std::string_view language, std::string_view word,
                               std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(derive_seed(seed, std::string(language) + " " + std::string(word)));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> u(kPoseWidth), phi(kPoseWidth);
  for (std::size_t c = 0; c < kPoseWidth; ++c) {
    u[c] = unit(rng);
    phi[c] = phase(rng);
  }
  std::vector<float> m(kMotifFrames * kPoseWidth);
  for (std::size_t f = 0; f < kMotifFrames; ++f)
    for (std::size_t c = 0; c < kPoseWidth; ++c)
      m[f * kPoseWidth + c] = static_cast<float>(
          amplitude * (0.8 * u[c] + 0.2 * std::sin(2.0 * std::numbers::pi * f / kMotifFrames + phi[c])));
  return m;
}

namespace {

std::string make_word(std::mt19937_64& rng) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1), v(0, vowels.size() - 1);
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w += consonants[c(rng)];
    w += vowels[v(rng)];
  }
  return w;
}

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

double distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double motif_separation(const std::map<std::string, std::vector<float>>& motifs) {
  if (motifs.empty()) return 0.0;
  if (motifs.size() == 1) {
    const auto& m = motifs.begin()->second;
    return 2.0 * distance(m, std::vector<float>(m.size(), 0.0f));
  }
  double min_sep = std::numeric_limits<double>::infinity();
  for (auto i = motifs.begin(); i != motifs.end(); ++i)
    for (auto j = std::next(i); j != motifs.end(); ++j)
      min_sep = std::min(min_sep, distance(i->second, j->second));
  return min_sep;
}

SynthCorpus generate(const SynthSpec& spec) {
  validate(spec);
  SynthCorpus corpus;
  corpus.spec = spec;

  std::set<std::string> taken;
  for (const auto& lang : spec.languages) {
    std::mt19937_64 rng(derive_seed(spec.seed, "lexicon " + lang));
    auto& words = corpus.lexicon[lang];
    while (words.size() < spec.vocab_per_language) {
      auto w = make_word(rng);
      if (taken.insert(w).second) words.push_back(std::move(w));
    }
    for (const auto& w : words)
      corpus.motifs[lang + " " + w] = token_motif(lang, w, spec.seed, spec.motif_amplitude);
  }

  const double min_sep = motif_separation(corpus.motifs);
  if (!(min_sep > 0.0)) fail(ErrorCode::InvalidArgument, "two token motifs coincide");
  corpus.min_separation = min_sep;

  const std::size_t min_tokens = (spec.min_frames + kMotifFrames - 1) / kMotifFrames;
  const std::size_t max_tokens = std::max(min_tokens, spec.max_frames / kMotifFrames);
  for (const auto& lang : spec.languages) {
    const auto& words = corpus.lexicon[lang];
    for (std::size_t k = 0; k < spec.clips; ++k) {
      SynthClip clip;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04zu", k);
      clip.id = lang + "-" + buf;
      clip.language = lang;
      std::mt19937_64 rng(derive_seed(spec.seed, "clip " + clip.id));
      std::uniform_int_distribution<std::size_t> len(min_tokens, max_tokens);
      std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
      const std::size_t n = len(rng);
      for (std::size_t t = 0; t < n; ++t) {
        const auto& w = words[pick(rng)];
        if (!clip.transcript.empty()) clip.transcript += ' ';
        clip.transcript += w;
        clip.gloss.push_back(upper(w));
        const auto& m = corpus.motifs.at(lang + " " + w);
        clip.pose.insert(clip.pose.end(), m.begin(), m.end());
      }
      corpus.clips.push_back(std::move(clip));
    }
  }

  const auto prompts = associate(transcripts(corpus), builtin_bank(spec.languages), spec.seed);
  for (std::size_t i = 0; i < prompts.size(); ++i) corpus.clips[i].prompt = prompts[i].prompt;
  return corpus;
}

std::vector<PoseClip> pose_clips(const SynthCorpus& c) {
  std::vector<PoseClip> out;
  out.reserve(c.clips.size());
  for (const auto& clip : c.clips) out.push_back({clip.id, clip.pose});
  return out;
}

std::vector<TranscriptItem> transcripts(const SynthCorpus& c) {
  std::vector<TranscriptItem> out;
  out.reserve(c.clips.size());
  for (const auto& clip : c.clips) out.push_back({clip.id, clip.language, clip.transcript});
  return out;
}

std::vector<PromptItem> prompt_items(const SynthCorpus& c) {
  std::vector<PromptItem> out;
  out.reserve(c.clips.size());
  for (const auto& clip : c.clips) out.push_back({clip.id, clip.language, clip.prompt, 0});
  return out;
}

ReverseOracle::ReverseOracle(const SynthCorpus& corpus) : tolerance_(corpus.min_separation / 2.0) {
  for (const auto& [key, motif] : corpus.motifs) {
    const auto space = key.find(' ');
    entries_.push_back({key.substr(0, space), key.substr(space + 1), motif});
  }
}

std::vector<std::string> ReverseOracle::decode(std::span<const float> pose,
                                               std::optional<std::string_view> language) const {
  if (pose.size() % kPoseWidth != 0)
    fail(ErrorCode::WidthMismatch, "pose is not a multiple of 150 values");
  const std::size_t T = pose.size() / kPoseWidth;
  const std::size_t chunks = static_cast<std::size_t>(
      std::lround(static_cast<double>(T) / static_cast<double>(kMotifFrames)));
  std::vector<std::string> out;
  for (std::size_t k = 0; k < chunks; ++k) {
    const std::size_t begin = k * kMotifFrames;
    const std::size_t end = std::min(T, begin + kMotifFrames);
    const auto chunk = pose.subspan(begin * kPoseWidth, (end - begin) * kPoseWidth);
    double best = std::numeric_limits<double>::infinity();
    const Entry* best_entry = nullptr;
    for (const auto& e : entries_) {
      if (language && e.language != *language) continue;
      const double d = distance(chunk, std::span<const float>(e.motif).first(chunk.size()));
      if (d < best) {
        best = d;
        best_entry = &e;
      }
    }
    out.push_back(best_entry && best <= tolerance_ ? best_entry->word : std::string("<unk>"));
  }
  return out;
}

}  // namespace signforge
