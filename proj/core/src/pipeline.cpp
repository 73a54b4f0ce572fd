#include "signforge/pipeline.hpp"

#include <json.hpp>

#include "signforge/config.hpp"
#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/parallel.hpp"
#include "signforge/storage.hpp"

namespace signforge {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

MlsfModel build_mlsf(const Corpus& corpus, const ModelConfig& config, const VocabOptions& vocab,
                     std::uint64_t seed) {
  MlsfModel m;
  m.config = config;
  for (const auto& lang : languages_of(corpus)) {
    auto v = transcript_vocab(filter_language(corpus, lang), vocab.max_size, vocab.case_sensitive);
    m.registry.register_language(lang, build(config, HeadKind::Pose, v.size(), 0,
                                             derive_seed(seed, std::string_view(lang))));
    m.vocabs.emplace(lang, std::move(v));
  }
  return m;
}

Prompt2LangGlossModel build_p2lg(const Corpus& corpus, const ModelConfig& config,
                                 const VocabOptions& vocab, const LanguageTags& tags,
                                 std::uint64_t seed) {
  auto pv = prompt_vocab(corpus, vocab.max_size, vocab.case_sensitive);
  auto gv = langgloss_vocab(corpus, vocab.max_size, tags);
  auto gloss_stage = build(config, HeadKind::Tokens, pv.size(), gv.size(),
                           derive_seed(seed, std::string_view("gloss_stage")));
  auto pose_stage =
      build(config, HeadKind::Pose, gv.size(), 0, derive_seed(seed, std::string_view("pose_stage")));
  return {std::move(pv), std::move(gv), std::move(gloss_stage), std::move(pose_stage)};
}

std::vector<float> generate_mlsf(const MlsfModel& model, std::string_view language,
                                 std::string_view text) {
  auto it = model.vocabs.find(std::string(language));
  if (it == model.vocabs.end())
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(language) + "' is not registered");
  const auto ids = encode(tokenize_text(text, it->second.case_sensitive()), it->second).ids;
  return generate_pose(model.registry, language, ids);
}

Prompt2LangGlossResult generate_p2lg(const Prompt2LangGlossModel& model, std::string_view language,
                                     std::string_view prompt, const LanguageTags& tags) {
  if (!tags.contains(language))
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(language) + "' is not registered");
  const auto ids =
      encode(tokenize_text(prompt, model.prompt_vocab.case_sensitive()), model.prompt_vocab).ids;
  return generate_prompt2langgloss(model, ids, language, tags);
}

ScoreReport evaluate_mlsf(const MlsfModel& model, const Corpus& corpus, const PoseReader& reverse,
                          std::size_t jobs) {
  const auto items = eval_items(corpus, false);
  return back_translation_eval(
      items,
      [&](const EvalItem& it) {
        return generate_mlsf(model, it.language, corpus[static_cast<std::size_t>(&it - items.data())].transcript);
      },
      reverse, jobs);
}

ScoreReport evaluate_p2lg(const Prompt2LangGlossModel& model, const Corpus& corpus,
                          const PoseReader& reverse, const LanguageTags& tags, std::size_t jobs) {
  const auto items = eval_items(corpus, false);
  return back_translation_eval(
      items,
      [&](const EvalItem& it) {
        const auto& src = corpus[static_cast<std::size_t>(&it - items.data())];
        return generate_p2lg(model, it.language, src.prompt, tags).pose;
      },
      reverse, jobs);
}

double mean_dtw(const Corpus& corpus, const std::function<std::vector<float>(const CorpusItem&)>& gen,
                std::size_t jobs) {
  if (corpus.empty()) return 0.0;
  std::vector<double> d(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const auto pose = gen(corpus[i]);
    d[i] = pose.empty() ? std::numeric_limits<double>::infinity() : dtw(pose, corpus[i].pose);
  });
  double s = 0.0;
  for (double x : d) s += x;
  return s / static_cast<double>(d.size());
}

namespace {

TrainHooks dtw_hooks(std::size_t eval_every, const Corpus& corpus, std::size_t jobs,
                     std::function<std::vector<float>(const CorpusItem&)> gen) {
  TrainHooks hooks;
  if (eval_every == 0) return hooks;
  hooks.evaluate = [=, &corpus](std::size_t epoch) -> std::optional<double> {
    if (epoch % eval_every != 0) return std::nullopt;
    return mean_dtw(corpus, gen, jobs);
  };
  return hooks;
}

RLConfig stage_config(const RLConfig& base, std::string_view stage) {
  RLConfig c = base;
  c.seed = derive_seed(base.seed, stage);
  return c;
}

}  // namespace

std::vector<StageLog> train_mlsf(MlsfModel& model, const Corpus& corpus, const RLConfig& config,
                                 std::size_t eval_every) {
  std::vector<StageLog> out;
  for (const auto& lang : model.registry.languages()) {
    const auto part = filter_language(corpus, lang);
    if (part.empty()) continue;
    PrioritizedDataset data(transcript_pose_samples(part, model.vocabs.at(lang)));
    const auto hooks = dtw_hooks(eval_every, part, config.jobs, [&model, lang](const CorpusItem& it) {
      return generate_mlsf(model, lang, it.transcript);
    });
    out.push_back({lang, train(model.registry, lang, data, stage_config(config, lang), hooks)});
  }
  return out;
}

std::vector<StageLog> train_p2lg(Prompt2LangGlossModel& model, const Corpus& corpus,
                                 const RLConfig& config, const LanguageTags& tags,
                                 std::size_t eval_every) {
  std::vector<StageLog> out;
  {
    PrioritizedDataset data(prompt_gloss_samples(corpus, model.prompt_vocab, model.gloss_vocab, tags));
    const auto hooks = dtw_hooks(eval_every, corpus, config.jobs, [&](const CorpusItem& it) {
      return generate_p2lg(model, it.language, it.prompt, tags).pose;
    });
    out.push_back({"gloss_stage", train(model.gloss_stage, data, stage_config(config, "gloss_stage"), hooks)});
  }
  {
    PrioritizedDataset data(gloss_pose_samples(corpus, model.gloss_vocab, tags));
    const auto hooks = dtw_hooks(eval_every, corpus, config.jobs, [&](const CorpusItem& it) {
      const auto ids = encode(item_langgloss(it, tags), model.gloss_vocab).ids;
      return generate_pose(model.pose_stage, ids);
    });
    out.push_back({"pose_stage", train(model.pose_stage, data, stage_config(config, "pose_stage"), hooks)});
  }
  return out;
}

std::string serialize_motifs(const SynthCorpus& corpus) {
  std::vector<ArchiveEntry> entries;
  for (const auto& [key, motif] : corpus.motifs)
    entries.push_back({key, kMotifFrames, kPoseWidth, motif});
  return write_archive(entries);
}

SynthCorpus motifs_from_archive(std::string_view bytes) {
  SynthCorpus c;
  for (auto& e : read_archive(bytes, kPoseWidth)) {
    const auto space = e.key.find(' ');
    if (space == std::string::npos || e.frame_count != kMotifFrames)
      fail(ErrorCode::MalformedDocument, "reverse model entry '" + e.key + "' is not a motif");
    c.lexicon[e.key.substr(0, space)].push_back(e.key.substr(space + 1));
    c.motifs[e.key] = std::move(e.values);
  }
  if (c.motifs.empty()) fail(ErrorCode::MissingReverseModel, "reverse model holds no motifs");
  c.min_separation = motif_separation(c.motifs);
  return c;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr int kCheckpointFormat = 1;

json read_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  if (!fs::exists(path)) fail(ErrorCode::Io, "no checkpoint manifest at " + path.string());
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedDocument, "checkpoint manifest: " + std::string(e.what()));
  }
}

EncDecPair load_pair(const fs::path& file, const ModelConfig& config, HeadKind head,
                     std::size_t source_vocab, std::size_t target_vocab) {
  auto pair = build(config, head, source_vocab, target_vocab, 0);
  pair.load(read_file(file));
  return pair;
}

}  // namespace

void save_mlsf(const MlsfModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  ordered_json manifest;
  manifest["format"] = kCheckpointFormat;
  manifest["mode"] = "mlsf";
  manifest["model"] = json::parse(model_config_json(model.config));
  ordered_json langs = ordered_json::object();
  for (const auto& lang : model.registry.languages()) {
    const auto& pair = model.registry.at(lang);
    const auto& vocab = model.vocabs.at(lang);
    write_file(dir / (lang + ".sfca"), pair.serialize());
    write_file(dir / (lang + ".vocab"), serialize_vocab(vocab));
    ordered_json entry;
    entry["checkpoint"] = lang + ".sfca";
    entry["vocab"] = lang + ".vocab";
    entry["case_sensitive"] = vocab.case_sensitive();
    entry["checksum"] = pair.checksum();
    langs[lang] = entry;
  }
  manifest["languages"] = langs;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

MlsfModel load_mlsf(const fs::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.value("mode", "") != "mlsf")
    fail(ErrorCode::BadConfig, "checkpoint at " + dir.string() + " is not an mlsf checkpoint");
  MlsfModel m;
  m.config = parse_model_config(manifest.at("model").dump());
  for (const auto& [lang, entry] : manifest.at("languages").items()) {
    auto vocab = parse_vocab(read_file(dir / entry.at("vocab").get<std::string>()),
                             entry.at("case_sensitive").get<bool>());
    m.registry.register_language(
        lang, load_pair(dir / entry.at("checkpoint").get<std::string>(), m.config, HeadKind::Pose,
                        vocab.size(), 0));
    m.vocabs.emplace(lang, std::move(vocab));
  }
  return m;
}

void save_p2lg(const Prompt2LangGlossModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "gloss_stage.sfca", model.gloss_stage.serialize());
  write_file(dir / "pose_stage.sfca", model.pose_stage.serialize());
  write_file(dir / "prompt.vocab", serialize_vocab(model.prompt_vocab));
  write_file(dir / "gloss.vocab", serialize_vocab(model.gloss_vocab));
  ordered_json manifest;
  manifest["format"] = kCheckpointFormat;
  manifest["mode"] = "p2lg";
  manifest["model"] = json::parse(model_config_json(model.gloss_stage.config()));
  manifest["prompt_case_sensitive"] = model.prompt_vocab.case_sensitive();
  manifest["gloss_stage"] = {{"checkpoint", "gloss_stage.sfca"},
                             {"checksum", model.gloss_stage.checksum()}};
  manifest["pose_stage"] = {{"checkpoint", "pose_stage.sfca"},
                            {"checksum", model.pose_stage.checksum()}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Prompt2LangGlossModel load_p2lg(const fs::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.value("mode", "") != "p2lg")
    fail(ErrorCode::BadConfig, "checkpoint at " + dir.string() + " is not a p2lg checkpoint");
  const auto config = parse_model_config(manifest.at("model").dump());
  auto pv = parse_vocab(read_file(dir / "prompt.vocab"), manifest.at("prompt_case_sensitive").get<bool>());
  auto gv = parse_vocab(read_file(dir / "gloss.vocab"), true);
  auto gloss_stage = load_pair(dir / "gloss_stage.sfca", config, HeadKind::Tokens, pv.size(), gv.size());
  auto pose_stage = load_pair(dir / "pose_stage.sfca", config, HeadKind::Pose, gv.size(), 0);
  return {std::move(pv), std::move(gv), std::move(gloss_stage), std::move(pose_stage)};
}

std::string checkpoint_mode(const fs::path& dir) {
  return read_manifest(dir).value("mode", "");
}

}  // namespace signforge
