#include "signforge/signmodel.hpp"

#include <algorithm>
#include <cmath>

#include "signforge/error.hpp"
#include "signforge/storage.hpp"

namespace signforge {

using ad::Shape;
using ad::Tape;
using ad::Tensor;

SizeClass parse_size_class(std::string_view name) {
  if (name == "tiny" || name == "Tiny") return SizeClass::Tiny;
  if (name == "base" || name == "Base") return SizeClass::Base;
  if (name == "large" || name == "Large") return SizeClass::Large;
  if (name == "super" || name == "Super") return SizeClass::Super;
  fail(ErrorCode::BadConfig, "unknown size class '" + std::string(name) + "'");
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Tiny: return "tiny";
    case SizeClass::Base: return "base";
    case SizeClass::Large: return "large";
    case SizeClass::Super: return "super";
  }
  return "tiny";
}

ModelConfig ModelConfig::for_size(SizeClass s) {
  ModelConfig c;
  c.size_class = s;
  std::size_t width = 32;
  switch (s) {
    case SizeClass::Tiny: width = 32; break;
    case SizeClass::Base: width = 512; break;
    case SizeClass::Large: width = 1024; break;
    case SizeClass::Super: width = 2048; break;
  }
  c.embed_dim = c.hidden_dim = width;
  c.ffn_dim = 4 * width;
  return c;
}

void validate(const ModelConfig& c) {
  if (c.ffn_dim != 4 * c.hidden_dim)
    fail(ErrorCode::BadConfig, "ffn_dim (" + std::to_string(c.ffn_dim) +
                                   ") must equal 4 * hidden_dim (" +
                                   std::to_string(4 * c.hidden_dim) + ")");
  if (c.heads == 0 || c.embed_dim % c.heads != 0 || c.hidden_dim % c.heads != 0)
    fail(ErrorCode::BadConfig, "embed_dim and hidden_dim must be divisible by heads");
  if (c.layers == 0) fail(ErrorCode::BadConfig, "layers must be >= 1");
  if (c.embed_dim == 0 || c.hidden_dim == 0) fail(ErrorCode::BadConfig, "dimensions must be positive");
  if (c.max_sent_length == 0) fail(ErrorCode::BadConfig, "max_sent_length must be >= 1");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) fail(ErrorCode::BadConfig, "dropout must lie in [0,1)");
}

std::vector<float> sinusoidal_positions(std::size_t length, std::size_t width) {
  std::vector<float> pe(length * width);
  for (std::size_t pos = 0; pos < length; ++pos)
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / width);
      const double a = static_cast<double>(pos) * rate;
      pe[pos * width + i] = static_cast<float>(i % 2 == 0 ? std::sin(a) : std::cos(a));
    }
  return pe;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct Initializer {
  std::mt19937_64 rng;

  std::vector<float> xavier(std::size_t fan_in, std::size_t fan_out) {
    const float s = static_cast<float>(std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
    std::uniform_real_distribution<float> u(-s, s);
    std::vector<float> v(fan_in * fan_out);
    for (float& x : v) x = u(rng);
    return v;
  }
};

void add_linear(ad::ParameterSet<float>& p, Initializer& init, const std::string& name,
                std::size_t in, std::size_t out) {
  p.add(name + ".w", {in, out}, init.xavier(in, out));
  p.add(name + ".b", {out}, std::vector<float>(out, 0.0f));
}

void add_norm(ad::ParameterSet<float>& p, const std::string& name, std::size_t width) {
  p.add(name + ".g", {width}, std::vector<float>(width, 1.0f));
  p.add(name + ".b", {width}, std::vector<float>(width, 0.0f));
}

void add_attention(ad::ParameterSet<float>& p, Initializer& init, const std::string& name,
                   std::size_t width) {
  for (const char* part : {".q", ".k", ".v", ".o"}) add_linear(p, init, name + part, width, width);
}

}  // namespace

EncDecPair::EncDecPair(const ModelConfig& config, HeadKind head, std::size_t source_vocab,
                       std::size_t target_vocab, std::uint64_t seed)
    : config_(config), head_(head), source_vocab_(source_vocab), target_vocab_(target_vocab) {
  validate(config_);
  if (source_vocab_ == 0) fail(ErrorCode::BadConfig, "source vocabulary must be non-empty");
  if (head_ == HeadKind::Tokens && target_vocab_ == 0)
    fail(ErrorCode::BadConfig, "token head needs a target vocabulary");
  if (head_ == HeadKind::Pose) target_vocab_ = 0;

  const std::size_t e = config_.embed_dim, h = config_.hidden_dim, f = config_.ffn_dim;
  Initializer init{std::mt19937_64(seed)};
  auto& p = params_;

  p.add("src_embed", {source_vocab_, e}, init.xavier(source_vocab_, e));
  if (e != h) add_linear(p, init, "src_proj", e, h);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string L = "enc." + std::to_string(l);
    add_norm(p, L + ".ln1", h);
    add_attention(p, init, L + ".self", h);
    add_norm(p, L + ".ln2", h);
    add_linear(p, init, L + ".ffn1", h, f);
    add_linear(p, init, L + ".ffn2", f, h);
  }
  add_norm(p, "enc.ln", h);

  if (head_ == HeadKind::Pose) {
    add_linear(p, init, "frame_in", kPoseFrameWidth, h);
  } else {
    p.add("tgt_embed", {target_vocab_, e}, init.xavier(target_vocab_, e));
    if (e != h) add_linear(p, init, "tgt_proj", e, h);
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string L = "dec." + std::to_string(l);
    add_norm(p, L + ".ln1", h);
    add_attention(p, init, L + ".self", h);
    add_norm(p, L + ".ln2", h);
    add_attention(p, init, L + ".cross", h);
    add_norm(p, L + ".ln3", h);
    add_linear(p, init, L + ".ffn1", h, f);
    add_linear(p, init, L + ".ffn2", f, h);
  }
  add_norm(p, "dec.ln", h);
  add_linear(p, init, "head", h, output_width());
}

EncDecPair build(const ModelConfig& config, HeadKind head, std::size_t source_vocab,
                 std::size_t target_vocab, std::uint64_t seed) {
  return EncDecPair(config, head, source_vocab, target_vocab, seed);
}

EncDecPair EncDecPair::clone() const {
  EncDecPair c;
  c.config_ = config_;
  c.head_ = head_;
  c.source_vocab_ = source_vocab_;
  c.target_vocab_ = target_vocab_;
  for (const auto& [name, t] : params_.entries())
    c.params_.add(name, t.shape(), std::vector<float>(t.values().begin(), t.values().end()));
  return c;
}

std::size_t EncDecPair::output_width() const noexcept {
  return head_ == HeadKind::Pose ? kPoseFrameWidth : target_vocab_;
}

// ---------------------------------------------------------------------------
// Forward pass (pre-norm residual blocks)

Tensor<float> EncDecPair::linear(Tape<float>& tape, const std::string& prefix,
                                 const Tensor<float>& x) const {
  return tape.add(tape.matmul(x, params_.at(prefix + ".w")), params_.at(prefix + ".b"));
}

Tensor<float> EncDecPair::norm(Tape<float>& tape, const std::string& prefix,
                               const Tensor<float>& x) const {
  return tape.layer_norm(x, params_.at(prefix + ".g"), params_.at(prefix + ".b"));
}

Tensor<float> EncDecPair::dropout(Tape<float>& tape, const Tensor<float>& x,
                                  std::mt19937_64* rng) const {
  if (!rng || config_.dropout <= 0.0) return x;
  const float keep = static_cast<float>(1.0 - config_.dropout);
  std::bernoulli_distribution coin(keep);
  std::vector<float> mask(x.size());
  for (float& m : mask) m = coin(*rng) ? 1.0f / keep : 0.0f;
  return tape.multiply(x, Tensor<float>::constant(x.shape(), std::move(mask)));
}

Tensor<float> EncDecPair::attention(Tape<float>& tape, const std::string& prefix,
                                    const Tensor<float>& q_in, const Tensor<float>& kv_in,
                                    bool causal) const {
  const std::size_t h = config_.hidden_dim, heads = config_.heads, dh = h / heads;
  const Tensor<float> q = linear(tape, prefix + ".q", q_in);
  const Tensor<float> k = linear(tape, prefix + ".k", kv_in);
  const Tensor<float> v = linear(tape, prefix + ".v", kv_in);
  const float inv = 1.0f / std::sqrt(static_cast<float>(dh));
  std::vector<Tensor<float>> outs;
  outs.reserve(heads);
  for (std::size_t i = 0; i < heads; ++i) {
    const auto qi = tape.slice(q, 1, i * dh, (i + 1) * dh);
    const auto ki = tape.slice(k, 1, i * dh, (i + 1) * dh);
    const auto vi = tape.slice(v, 1, i * dh, (i + 1) * dh);
    const auto scores = tape.scale(tape.matmul(qi, ki, true), inv);
    outs.push_back(tape.matmul(tape.softmax(scores, causal), vi));
  }
  const Tensor<float> joined = heads == 1 ? outs.front() : tape.concat(outs, 1);
  return linear(tape, prefix + ".o", joined);
}

Tensor<float> EncDecPair::stack(Tape<float>& tape, Tensor<float> x, const std::string& prefix,
                                const Tensor<float>* memory, bool causal,
                                std::mt19937_64* rng) const {
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string L = prefix + "." + std::to_string(l);
    const auto n1 = norm(tape, L + ".ln1", x);
    x = tape.add(x, dropout(tape, attention(tape, L + ".self", n1, n1, causal), rng));
    std::string ffn_norm = L + ".ln2";
    if (memory) {
      const auto n2 = norm(tape, L + ".ln2", x);
      x = tape.add(x, dropout(tape, attention(tape, L + ".cross", n2, *memory, false), rng));
      ffn_norm = L + ".ln3";
    }
    const auto n3 = norm(tape, ffn_norm, x);
    const auto hidden = tape.relu(linear(tape, L + ".ffn1", n3));
    x = tape.add(x, dropout(tape, linear(tape, L + ".ffn2", hidden), rng));
  }
  return norm(tape, prefix + ".ln", x);
}

Tensor<float> EncDecPair::embed(Tape<float>& tape, const std::string& table,
                                std::span<const TokenId> ids) const {
  const std::size_t e = config_.embed_dim, h = config_.hidden_dim;
  Tensor<float> x = tape.scale(tape.embedding_lookup(params_.at(table), ids),
                               std::sqrt(static_cast<float>(e)));
  if (e != h) x = linear(tape, table == "src_embed" ? "src_proj" : "tgt_proj", x);
  return x;
}

Tensor<float> EncDecPair::encode(Tape<float>& tape, std::span<const TokenId> src,
                                 std::mt19937_64* rng) const {
  if (src.empty()) fail(ErrorCode::EmptyMemory, "cannot encode an empty source");
  if (src.size() > config_.max_sent_length)
    fail(ErrorCode::TooLong, "source length " + std::to_string(src.size()) +
                                 " exceeds max_sent_length " +
                                 std::to_string(config_.max_sent_length));
  const std::size_t h = config_.hidden_dim;
  Tensor<float> x = embed(tape, "src_embed", src);
  x = tape.add(x, Tensor<float>::constant({src.size(), h}, sinusoidal_positions(src.size(), h)));
  return stack(tape, x, "enc", nullptr, false, rng);
}

Tensor<float> EncDecPair::decode_pose(Tape<float>& tape, const Tensor<float>& frames_in,
                                      const Tensor<float>& memory, std::mt19937_64* rng) const {
  if (head_ != HeadKind::Pose) fail(ErrorCode::BadConfig, "decode_pose on a token-head pair");
  if (memory.rows() == 0 || memory.size() == 0)
    fail(ErrorCode::EmptyMemory, "decoder memory is empty");
  if (frames_in.rank() != 2 || frames_in.cols() != kPoseFrameWidth)
    fail(ErrorCode::ShapeMismatch, "decode_pose expects [w, 151] frames, got " +
                                       ad::shape_string(frames_in.shape()));
  const std::size_t w = frames_in.rows(), h = config_.hidden_dim;
  Tensor<float> x = linear(tape, "frame_in", frames_in);
  x = tape.add(x, Tensor<float>::constant({w, h}, sinusoidal_positions(w, h)));
  x = stack(tape, x, "dec", &memory, true, rng);
  return linear(tape, "head", x);
}

Tensor<float> EncDecPair::decode_tokens(Tape<float>& tape, std::span<const TokenId> tgt_in,
                                        const Tensor<float>& memory, std::mt19937_64* rng) const {
  if (head_ != HeadKind::Tokens) fail(ErrorCode::BadConfig, "decode_tokens on a pose-head pair");
  if (memory.rows() == 0 || memory.size() == 0)
    fail(ErrorCode::EmptyMemory, "decoder memory is empty");
  const std::size_t w = tgt_in.size(), h = config_.hidden_dim;
  Tensor<float> x = embed(tape, "tgt_embed", tgt_in);
  x = tape.add(x, Tensor<float>::constant({w, h}, sinusoidal_positions(w, h)));
  x = stack(tape, x, "dec", &memory, true, rng);
  return linear(tape, "head", x);
}

std::string EncDecPair::serialize() const {
  std::vector<ArchiveEntry> entries;
  entries.reserve(params_.count());
  for (const auto& [name, t] : params_.entries()) {
    ArchiveEntry e;
    e.key = name;
    e.frame_count = t.rank() == 2 ? t.rows() : 1;
    e.width = t.cols();
    e.values.assign(t.values().begin(), t.values().end());
    entries.push_back(std::move(e));
  }
  return write_archive(entries);
}

void EncDecPair::load(std::string_view archive_bytes) {
  const auto entries = read_archive(archive_bytes);
  if (entries.size() != params_.count())
    fail(ErrorCode::BadConfig, "checkpoint holds " + std::to_string(entries.size()) +
                                   " parameters, model expects " +
                                   std::to_string(params_.count()));
  for (const auto& e : entries) {
    if (!params_.contains(e.key))
      fail(ErrorCode::BadConfig, "checkpoint parameter '" + e.key + "' is unknown to the model");
    auto& t = params_.at(e.key);
    if (t.size() != e.values.size())
      fail(ErrorCode::BadConfig, "checkpoint parameter '" + e.key + "' has the wrong size");
    std::copy(e.values.begin(), e.values.end(), t.mutable_values().begin());
  }
}

// ---------------------------------------------------------------------------
// Registry

LanguageRegistry::LanguageRegistry(LanguageRegistry&& other) noexcept {
  std::lock_guard lock(other.mu_);
  pairs_ = std::move(other.pairs_);
}

LanguageRegistry& LanguageRegistry::operator=(LanguageRegistry&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    pairs_ = std::move(other.pairs_);
  }
  return *this;
}

void LanguageRegistry::register_language(const std::string& tag, EncDecPair pair) {
  if (!LanguageTags::well_formed(tag))
    fail(ErrorCode::InvalidArgument, "malformed language tag '" + tag + "'");
  std::lock_guard lock(mu_);
  if (pairs_.count(tag)) fail(ErrorCode::DuplicateTag, "language '" + tag + "' is already registered");
  pairs_.emplace(tag, std::make_unique<EncDecPair>(std::move(pair)));
}

void LanguageRegistry::remove_language(std::string_view tag) {
  std::lock_guard lock(mu_);
  auto it = pairs_.find(tag);
  if (it == pairs_.end())
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(tag) + "' is not registered");
  pairs_.erase(it);
}

EncDecPair& LanguageRegistry::at(std::string_view tag) {
  std::lock_guard lock(mu_);
  auto it = pairs_.find(tag);
  if (it == pairs_.end())
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(tag) + "' is not registered");
  return *it->second;
}

const EncDecPair& LanguageRegistry::at(std::string_view tag) const {
  std::lock_guard lock(mu_);
  auto it = pairs_.find(tag);
  if (it == pairs_.end())
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(tag) + "' is not registered");
  return *it->second;
}

bool LanguageRegistry::contains(std::string_view tag) const {
  std::lock_guard lock(mu_);
  return pairs_.find(tag) != pairs_.end();
}

std::vector<std::string> LanguageRegistry::languages() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [tag, p] : pairs_) out.push_back(tag);
  return out;
}

// ---------------------------------------------------------------------------
// Inference

Tensor<float> encode(const EncDecPair& pair, std::span<const TokenId> src) {
  Tape<float> tape(false);
  return pair.encode(tape, src);
}

std::vector<float> decode_pose_step(const EncDecPair& pair, std::span<const float> previous_frames,
                                    const Tensor<float>& memory) {
  if (previous_frames.empty() || previous_frames.size() % kPoseFrameWidth != 0)
    fail(ErrorCode::ShapeMismatch, "previous frames must be a positive multiple of 151 values");
  const std::size_t w = previous_frames.size() / kPoseFrameWidth;
  Tape<float> tape(false);
  const auto in = Tensor<float>::constant(
      {w, kPoseFrameWidth}, std::vector<float>(previous_frames.begin(), previous_frames.end()));
  const auto out = pair.decode_pose(tape, in, memory);
  const auto v = out.values();
  return std::vector<float>(v.end() - kPoseFrameWidth, v.end());
}

std::vector<float> generate_pose(const EncDecPair& pair, std::span<const TokenId> src) {
  const auto memory = encode(pair, src);
  const std::size_t cap = pair.config().max_sent_length;
  std::vector<float> history(kPoseFrameWidth, 0.0f);
  std::vector<float> frames;
  frames.reserve(cap * kPoseWidth);
  for (std::size_t t = 0; t < cap; ++t) {
    const auto next = decode_pose_step(pair, history, memory);
    frames.insert(frames.end(), next.begin(), next.begin() + kPoseWidth);
    if (next[kCounterIndex] >= 1.0f) break;
    history.insert(history.end(), next.begin(), next.end());
  }
  return frames;
}

std::vector<float> generate_pose(const LanguageRegistry& registry, std::string_view language,
                                 std::span<const TokenId> src) {
  return generate_pose(registry.at(language), src);
}

std::vector<TokenId> decode_gloss(const EncDecPair& pair, const Tensor<float>& memory) {
  if (pair.head() != HeadKind::Tokens) fail(ErrorCode::BadConfig, "decode_gloss needs a token head");
  const std::size_t V = pair.target_vocab();
  std::vector<TokenId> seq{kBosId};
  std::vector<TokenId> out;
  for (std::size_t step = 0; step < pair.config().max_sent_length; ++step) {
    Tape<float> tape(false);
    const auto logits = pair.decode_tokens(tape, seq, memory);
    const float* last = logits.values().data() + (seq.size() - 1) * V;
    TokenId best = kEosId;
    float best_v = -std::numeric_limits<float>::infinity();
    for (TokenId id = 0; id < V; ++id) {
      if (id == kPadId || id == kBosId) continue;
      if (last[id] > best_v) {
        best_v = last[id];
        best = id;
      }
    }
    if (best == kEosId) break;
    out.push_back(best);
    seq.push_back(best);
  }
  return out;
}

Prompt2LangGlossResult generate_prompt2langgloss(const Prompt2LangGlossModel& model,
                                                 std::span<const TokenId> prompt_ids,
                                                 std::string_view expected_language,
                                                 const LanguageTags& tags) {
  Prompt2LangGlossResult r;
  const auto memory = encode(model.gloss_stage, prompt_ids);
  const auto gloss_ids = decode_gloss(model.gloss_stage, memory);
  std::vector<TokenId> stage2{kBosId};
  for (TokenId id : gloss_ids) {
    r.gloss.push_back(model.gloss_vocab.token(id));
    stage2.push_back(id < model.pose_stage.source_vocab() ? id : kUnkId);
  }
  stage2.push_back(kEosId);
  if (stage2.size() > model.pose_stage.config().max_sent_length)
    stage2.resize(model.pose_stage.config().max_sent_length);
  r.violations = detect_violation(r.gloss, expected_language, tags);
  r.pose = generate_pose(model.pose_stage, stage2);
  return r;
}

}  // namespace signforge
