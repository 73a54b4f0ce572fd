#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signforge/langgloss.hpp"
#include "signforge/language.hpp"
#include "signforge/skeleton.hpp"
#include "signforge/tensor.hpp"

namespace signforge {

// 150 pose values + 1 progress counter.
inline constexpr std::size_t kPoseFrameWidth = kPoseWidth + 1;
inline constexpr std::size_t kCounterIndex = kPoseWidth;

enum class SizeClass { Tiny, Base, Large, Super };

SizeClass parse_size_class(std::string_view name);
std::string_view to_string(SizeClass s);

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t ffn_dim = 128;
  std::size_t max_sent_length = 300;
  double dropout = 0.0;
  SizeClass size_class = SizeClass::Tiny;

  // Base (512, 512, 2048); Large doubles and Super quadruples the widths;
  // Tiny is (32, 32, 128). Layers = 2 and heads = 4 throughout.
  static ModelConfig for_size(SizeClass s);
};

// Throws BadConfig naming the violated rule.
void validate(const ModelConfig& c);

enum class HeadKind { Tokens, Pose };

// One encoder-decoder with either a token-logit head or a 151-wide pose
// regression head. Parameters are owned; the pair is move-only.
class EncDecPair {
 public:
  EncDecPair(const ModelConfig& config, HeadKind head, std::size_t source_vocab,
             std::size_t target_vocab, std::uint64_t seed);
  EncDecPair(EncDecPair&&) = default;
  EncDecPair& operator=(EncDecPair&&) = default;
  EncDecPair(const EncDecPair&) = delete;
  EncDecPair& operator=(const EncDecPair&) = delete;

  EncDecPair clone() const;

  const ModelConfig& config() const noexcept { return config_; }
  HeadKind head() const noexcept { return head_; }
  std::size_t source_vocab() const noexcept { return source_vocab_; }
  std::size_t target_vocab() const noexcept { return target_vocab_; }
  std::size_t output_width() const noexcept;

  ad::ParameterSet<float>& params() noexcept { return params_; }
  const ad::ParameterSet<float>& params() const noexcept { return params_; }
  std::uint64_t checksum() const { return params_.checksum(); }

  // Graph builders. `dropout_rng` enables dropout (training only).
  // src -> memory [U, hidden]. Throws TooLong when U > max_sent_length.
  ad::Tensor<float> encode(ad::Tape<float>& tape, std::span<const TokenId> src,
                           std::mt19937_64* dropout_rng = nullptr) const;
  // frames_in [w, 151] (row 0 = start frame) -> predictions [w, 151].
  ad::Tensor<float> decode_pose(ad::Tape<float>& tape, const ad::Tensor<float>& frames_in,
                                const ad::Tensor<float>& memory,
                                std::mt19937_64* dropout_rng = nullptr) const;
  // tgt_in ids (starting with <bos>) -> logits [w, target_vocab].
  ad::Tensor<float> decode_tokens(ad::Tape<float>& tape, std::span<const TokenId> tgt_in,
                                  const ad::Tensor<float>& memory,
                                  std::mt19937_64* dropout_rng = nullptr) const;

  // Archive bytes: one entry per named parameter (rows x cols).
  std::string serialize() const;
  // Loads parameter values into a pair built with the same shapes.
  void load(std::string_view archive_bytes);

 private:
  EncDecPair() = default;
  ad::Tensor<float> embed(ad::Tape<float>& tape, const std::string& table,
                          std::span<const TokenId> ids) const;
  ad::Tensor<float> stack(ad::Tape<float>& tape, ad::Tensor<float> x, const std::string& prefix,
                          const ad::Tensor<float>* memory, bool causal,
                          std::mt19937_64* rng) const;
  ad::Tensor<float> attention(ad::Tape<float>& tape, const std::string& prefix,
                              const ad::Tensor<float>& q_in, const ad::Tensor<float>& kv_in,
                              bool causal) const;
  ad::Tensor<float> linear(ad::Tape<float>& tape, const std::string& prefix,
                           const ad::Tensor<float>& x) const;
  ad::Tensor<float> norm(ad::Tape<float>& tape, const std::string& prefix,
                         const ad::Tensor<float>& x) const;
  ad::Tensor<float> dropout(ad::Tape<float>& tape, const ad::Tensor<float>& x,
                            std::mt19937_64* rng) const;

  ModelConfig config_;
  HeadKind head_ = HeadKind::Pose;
  std::size_t source_vocab_ = 0;
  std::size_t target_vocab_ = 0;
  ad::ParameterSet<float> params_;
};

EncDecPair build(const ModelConfig& config, HeadKind head, std::size_t source_vocab,
                 std::size_t target_vocab, std::uint64_t seed);

// The MLSF choice function: language tag -> its own encoder-decoder pair.
// Mutations are serialized; lookups of unregistered tags always throw.
class LanguageRegistry {
 public:
  LanguageRegistry() = default;
  LanguageRegistry(LanguageRegistry&& other) noexcept;
  LanguageRegistry& operator=(LanguageRegistry&& other) noexcept;

  void register_language(const std::string& tag, EncDecPair pair);
  void remove_language(std::string_view tag);

  EncDecPair& at(std::string_view tag);
  const EncDecPair& at(std::string_view tag) const;
  bool contains(std::string_view tag) const;
  std::vector<std::string> languages() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<EncDecPair>, std::less<>> pairs_;
};

// Inference-only memory for a source sequence.
ad::Tensor<float> encode(const EncDecPair& pair, std::span<const TokenId> src);

// Next 151-wide frame given previous frames (w x 151, row 0 = zero start
// frame). Only rows 0..w-1 influence the result. Throws EmptyMemory.
std::vector<float> decode_pose_step(const EncDecPair& pair, std::span<const float> previous_frames,
                                    const ad::Tensor<float>& memory);

// Greedy rollout until the predicted counter reaches 1.0 or the frame cap
// (max_sent_length) is hit. Returns T' x 150 values, counters stripped.
std::vector<float> generate_pose(const EncDecPair& pair, std::span<const TokenId> src);
std::vector<float> generate_pose(const LanguageRegistry& registry, std::string_view language,
                                 std::span<const TokenId> src);

// Greedy argmax from <bos> until <eos> or max_sent_length tokens; <pad> and
// <bos> are never emitted, ties go to the lowest id. Returned ids exclude
// <bos>/<eos>.
std::vector<TokenId> decode_gloss(const EncDecPair& pair, const ad::Tensor<float>& memory);

// Shared-parameter prompt -> LangGloss -> pose model.
struct Prompt2LangGlossModel {
  Vocab prompt_vocab;
  Vocab gloss_vocab;
  EncDecPair gloss_stage;  // token head: prompt ids -> LangGloss ids
  EncDecPair pose_stage;   // pose head: LangGloss ids -> frames
};

struct Prompt2LangGlossResult {
  std::vector<std::string> gloss;
  std::vector<float> pose;  // T' x 150
  std::vector<GlossViolation> violations;
};

Prompt2LangGlossResult generate_prompt2langgloss(const Prompt2LangGlossModel& model,
                                                 std::span<const TokenId> prompt_ids,
                                                 std::string_view expected_language,
                                                 const LanguageTags& tags);

// Sinusoidal position table [length, width].
std::vector<float> sinusoidal_positions(std::size_t length, std::size_t width);

}  // namespace signforge
