// signforge: command-line driver for the sign-production pipeline.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "run_manifest.hpp"
#include "signforge/config.hpp"
#include "signforge/corpus.hpp"
#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/ingest.hpp"
#include "signforge/lift3d.hpp"
#include "signforge/parallel.hpp"
#include "signforge/pipeline.hpp"
#include "signforge/prompts.hpp"
#include "signforge/storage.hpp"
#include "signforge/synth.hpp"
#include "signforge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace signforge;
using signforge::cli::RunManifest;

namespace {

struct Globals {
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
};

RunConfig load_config(const std::string& path, const Globals& g) {
  RunConfig c = path.empty() ? RunConfig{} : parse_run_config(read_file(path));
  if (g.seed) c.seed = *g.seed;
  c.training.jobs = g.jobs;
  return c;
}

std::string pick(const std::string& flag, const RunConfig& c, const std::string& key) {
  if (!flag.empty()) return flag;
  auto it = c.paths.find(key);
  return it == c.paths.end() ? std::string() : it->second;
}

std::string require_path(const std::string& flag, const RunConfig& c, const std::string& key,
                         const std::string& option) {
  auto p = pick(flag, c, key);
  if (p.empty()) fail(ErrorCode::BadConfig, "missing " + option + " (or paths." + key + ")");
  return p;
}

fs::path manifest_beside(const fs::path& out) {
  if (fs::is_directory(out)) return out / "manifest.json";
  return fs::path(out.string() + ".manifest.json");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  for (auto p : split_on(s, ','))
    if (!p.empty()) out.emplace_back(p);
  return out;
}

Corpus load_corpus(const std::string& skels, std::string sidecar, const std::string& transcripts,
                   const std::string& prompts, const std::string& gloss) {
  if (sidecar.empty()) sidecar = skels + ".ids";
  const auto clips = unpack_skels(read_file(skels), read_file(sidecar));
  const auto t = parse_transcripts(read_file(transcripts));
  const auto p = prompts.empty() ? std::vector<PromptItem>{} : parse_prompts(read_file(prompts));
  const auto g = gloss.empty() ? std::vector<GlossItem>{} : parse_gloss(read_file(gloss));
  return join_corpus(clips, t, p, g);
}

Corpus restrict_languages(Corpus c, const std::vector<std::string>& langs) {
  if (langs.empty()) return c;
  Corpus out;
  for (auto& item : c)
    if (std::find(langs.begin(), langs.end(), item.language) != langs.end())
      out.push_back(std::move(item));
  for (const auto& l : langs)
    if (std::none_of(out.begin(), out.end(), [&](const auto& i) { return i.language == l; }))
      fail(ErrorCode::UnknownLanguage, "no clips for language '" + l + "'");
  return out;
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (directories && e.is_directory()) out.push_back(e.path());
    if (!directories && e.is_regular_file() && e.path().extension() == ".json")
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, out, config, clean, language = "ASL", transcripts;
};

void run_ingest(const IngestArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  if (!a.clean.empty()) {
    try {
      cfg.clean.mode = parse_clean_mode(a.clean);
    } catch (const Error& e) {
      fail(ErrorCode::BadConfig, e.what());
    }
  }
  const fs::path input = require_path(a.input, cfg, "data", "--input");
  const fs::path out = require_path(a.out, cfg, "out", "--out");
  auto clip_dirs = sorted_entries(input, true);
  if (clip_dirs.empty()) clip_dirs.push_back(input);

  std::map<std::string, TranscriptItem> meta;
  if (!a.transcripts.empty())
    for (auto& t : parse_transcripts(read_file(a.transcripts))) meta[t.id] = t;

  std::vector<std::pair<Clip2D, CleanReport>> cleaned(clip_dirs.size());
  parallel_for(clip_dirs.size(), g.jobs, [&](std::size_t i) {
    const auto id = clip_dirs[i].filename().string();
    std::vector<std::string> docs;
    for (const auto& f : sorted_entries(clip_dirs[i], false)) docs.push_back(read_file(f));
    std::string lang = a.language, text;
    if (auto it = meta.find(id); it != meta.end()) {
      lang = it->second.language;
      text = it->second.transcript;
    }
    cleaned[i] = clean_clip(assemble_clip(docs, id, text, lang), cfg.clean);
  });

  std::vector<ArchiveEntry> entries;
  ordered_json report = ordered_json::array();
  for (const auto& [clip, rep] : cleaned) {
    entries.push_back(to_entry(clip));
    ordered_json r;
    r["id"] = clip.id;
    r["frames_in"] = rep.frames_in;
    r["frames_dropped"] = rep.frames_dropped;
    r["values_replaced"] = rep.values_replaced;
    r["replacement_fraction"] = rep.replacement_fraction;
    report.push_back(r);
  }
  write_file(out, write_archive(entries));
  const fs::path report_path = out.string() + ".clean.json";
  write_file(report_path, report.dump(2) + "\n");

  RunManifest m;
  m.command = "ingest";
  m.args = {{"language", a.language}};
  m.config = cfg;
  m.seed = cfg.seed;
  m.inputs = {input};
  if (!a.transcripts.empty()) m.inputs.push_back(a.transcripts);
  m.outputs = {out, report_path};
  cli::write_manifest(manifest_beside(out), m);
}

struct LiftArgs {
  std::string in, out, config;
  std::optional<double> percentile, noise;
};

void run_lift(const LiftArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  if (a.percentile) cfg.lift.percentile = *a.percentile;
  if (a.noise) cfg.lift.noise_sigma = *a.noise;
  cfg.lift.rng_seed = cfg.seed;
  try {
    validate(cfg.lift);
  } catch (const Error& e) {
    fail(ErrorCode::BadConfig, e.what());
  }
  const fs::path in = require_path(a.in, cfg, "data", "--in");
  const fs::path out = require_path(a.out, cfg, "out", "--out");
  const auto entries = read_archive(read_file(in));
  const auto structure = standard_structure();
  fs::create_directories(out);
  std::vector<Pose3DClip> poses(entries.size());
  parallel_for(entries.size(), g.jobs, [&](std::size_t i) {
    auto result = lift_clip(clip_from_entry(entries[i]), structure, cfg.lift);
    write_lift_outputs(out / entries[i].key, result);
    poses[i] = std::move(result.pose);
  });
  std::vector<ArchiveEntry> pose_entries;
  for (const auto& p : poses) pose_entries.push_back(to_entry(p));
  write_file(out / "poses.sfca", write_archive(pose_entries));

  RunManifest m;
  m.command = "lift";
  m.config = cfg;
  m.seed = cfg.seed;
  m.inputs = {in};
  m.outputs = {out};
  cli::write_manifest(out / "manifest.json", m);
}

struct PackArgs {
  std::string in, out;
};

void run_pack(const PackArgs& a, const Globals&) {
  if (a.in.empty() || a.out.empty()) fail(ErrorCode::BadConfig, "pack needs --in and --out");
  const auto entries = read_archive(read_file(a.in), kPoseWidth);
  std::vector<PoseClip> clips;
  std::size_t raw = 0;
  for (const auto& e : entries) {
    clips.push_back({e.key, e.values});
    // Raw proxy: one OpenPose-format document per frame.
    for (std::size_t t = 0; t < e.frame_count; ++t) {
      Frame2D f;
      for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
        const float* v = e.values.data() + t * kPoseWidth + 3 * j;
        f.x[j] = v[0];
        f.y[j] = v[1];
        f.w[j] = v[2];
      }
      raw += to_openpose_json(f).size();
    }
  }
  const auto files = pack_skels(clips);
  const fs::path out = a.out;
  const fs::path sidecar = a.out + ".ids";
  write_file(out, files.skels);
  write_file(sidecar, files.sidecar);
  const auto sr = size_report(raw, files.skels.size());
  ordered_json j;
  j["clips"] = clips.size();
  j["raw_bytes"] = sr.raw;
  j["packed_bytes"] = sr.packed;
  j["reduction_fraction"] = sr.reduction_fraction;
  std::cout << j.dump() << "\n";

  RunManifest m;
  m.command = "pack";
  m.inputs = {a.in};
  m.outputs = {out, sidecar};
  cli::write_manifest(manifest_beside(out), m);
}

struct PromptsArgs {
  std::string transcripts, bank, out, config;
  std::size_t k = 1;
};

void run_prompts(const PromptsArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  const fs::path tpath = require_path(a.transcripts, cfg, "transcripts", "--transcripts");
  const fs::path out = require_path(a.out, cfg, "out", "--out");
  const auto items = parse_transcripts(read_file(tpath));
  const std::string bank_path = pick(a.bank, cfg, "bank");
  TemplateBank bank;
  if (bank_path.empty()) {
    std::vector<std::string> langs;
    for (const auto& t : items)
      if (std::find(langs.begin(), langs.end(), t.language) == langs.end()) langs.push_back(t.language);
    bank = builtin_bank(langs);
  } else {
    bank = load_bank(bank_path);
  }
  write_file(out, serialize_prompts(augment(items, bank, a.k, cfg.seed)));

  RunManifest m;
  m.command = "prompts";
  m.args = {{"k", std::to_string(a.k)}};
  m.config = cfg;
  m.seed = cfg.seed;
  m.inputs = {tpath};
  if (!bank_path.empty()) m.inputs.push_back(bank_path);
  m.outputs = {out};
  cli::write_manifest(manifest_beside(out), m);
}

struct VocabArgs {
  std::string from = "transcripts", in, out, config;
  std::optional<std::size_t> size;
  bool langgloss = false;
};

void run_vocab(const VocabArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  if (a.size) cfg.vocab.max_size = *a.size;
  if (a.in.empty() || a.out.empty()) fail(ErrorCode::BadConfig, "vocab needs --in and --out");
  const auto text = read_file(a.in);
  std::vector<std::vector<std::string>> streams;
  bool case_sensitive = cfg.vocab.case_sensitive;
  if (a.from == "transcripts") {
    for (const auto& t : parse_transcripts(text))
      streams.push_back(tokenize_text(t.transcript, case_sensitive));
  } else if (a.from == "prompts") {
    for (const auto& p : parse_prompts(text)) streams.push_back(tokenize_text(p.prompt, case_sensitive));
  } else if (a.from == "gloss") {
    const auto tags = LanguageTags::defaults();
    case_sensitive = true;
    for (const auto& gl : parse_gloss(text))
      streams.push_back(a.langgloss ? to_langgloss(gl.gloss, gl.language, tags) : gl.gloss);
  } else {
    fail(ErrorCode::BadConfig, "--from must be transcripts, prompts or gloss");
  }
  write_file(a.out, serialize_vocab(build_vocab(streams, cfg.vocab.max_size, case_sensitive)));

  RunManifest m;
  m.command = "vocab";
  m.args = {{"from", a.from}, {"langgloss", a.langgloss ? "true" : "false"}};
  m.config = cfg;
  m.inputs = {a.in};
  m.outputs = {a.out};
  cli::write_manifest(manifest_beside(a.out), m);
}

struct DataArgs {
  std::string data, sidecar, transcripts, prompts, gloss;
};

Corpus load_data(const DataArgs& d, const RunConfig& cfg, std::vector<fs::path>* inputs) {
  const auto skels = require_path(d.data, cfg, "data", "--data");
  auto sidecar = pick(d.sidecar, cfg, "sidecar");
  if (sidecar.empty()) sidecar = skels + ".ids";
  const auto transcripts = require_path(d.transcripts, cfg, "transcripts", "--transcripts");
  const auto prompts = pick(d.prompts, cfg, "prompts");
  const auto gloss = pick(d.gloss, cfg, "gloss");
  if (inputs) {
    for (const auto& p : {skels, sidecar, transcripts, prompts, gloss})
      if (!p.empty()) inputs->push_back(p);
  }
  return load_corpus(skels, sidecar, transcripts, prompts, gloss);
}

struct TrainArgs {
  std::string mode, langs, config, out;
  DataArgs data;
};

void write_logs(const fs::path& out, const std::vector<StageLog>& logs) {
  std::string timing;
  for (const auto& s : logs) {
    std::string text;
    for (const auto& e : s.log.epochs) {
      text += to_jsonl(e, false);
      ordered_json t;
      t["stage"] = s.stage;
      t["epoch"] = e.epoch;
      t["wall_ms"] = e.wall_ms;
      timing += t.dump() + "\n";
    }
    write_file(out / ("train_log." + s.stage + ".jsonl"), text);
  }
  write_file(out / "timing.jsonl", timing);
}

void run_train(const TrainArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  if (!a.mode.empty()) cfg.mode = parse_train_mode(a.mode);
  if (!a.langs.empty()) cfg.languages = split_csv(a.langs);
  validate(cfg);
  const fs::path out = require_path(a.out, cfg, "out", "--out");
  std::vector<fs::path> inputs;
  const auto corpus = restrict_languages(load_data(a.data, cfg, &inputs), cfg.languages);
  const auto tags = LanguageTags::defaults();
  fs::create_directories(out);
  RLConfig rl = cfg.training;
  rl.seed = derive_seed(cfg.seed, std::string_view("train"));

  std::vector<StageLog> logs;
  if (cfg.mode == TrainMode::Mlsf) {
    auto model = build_mlsf(corpus, cfg.model, cfg.vocab, cfg.seed);
    logs = train_mlsf(model, corpus, rl, cfg.eval_every);
    save_mlsf(model, out);
  } else {
    auto model = build_p2lg(corpus, cfg.model, cfg.vocab, tags, cfg.seed);
    logs = train_p2lg(model, corpus, rl, tags, cfg.eval_every);
    save_p2lg(model, out);
  }
  write_logs(out, logs);
  // The checkpoint manifest doubles as the run manifest.
  auto ckpt = nlohmann::ordered_json::parse(read_file(out / "manifest.json"));
  RunManifest m;
  m.command = "train";
  m.config = cfg;
  m.seed = cfg.seed;
  m.inputs = inputs;
  cli::write_manifest(out / "run.json", m);
  auto run = nlohmann::ordered_json::parse(read_file(out / "run.json"));
  fs::remove(out / "run.json");
  ckpt["run"] = run;
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(out))
    if (!cli::volatile_file(e.path())) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  ordered_json outputs = ordered_json::object();
  for (const auto& f : files) outputs[f] = cli::digest_path(out / f);
  ckpt["run"]["outputs"] = outputs;
  write_file(out / "manifest.json", ckpt.dump(2) + "\n");
}

struct GenerateArgs {
  std::string ckpt, lang, text, prompt, mode, out, id = "generated";
};

void run_generate(const GenerateArgs& a, const Globals&) {
  if (a.ckpt.empty() || a.lang.empty() || a.out.empty())
    fail(ErrorCode::BadConfig, "generate needs --ckpt, --lang and --out");
  const std::string mode = a.mode.empty() ? checkpoint_mode(a.ckpt) : a.mode;
  std::vector<float> pose;
  std::optional<Prompt2LangGlossResult> p2lg;
  if (mode == "mlsf") {
    if (a.text.empty()) fail(ErrorCode::BadConfig, "mlsf generation needs --text");
    pose = generate_mlsf(load_mlsf(a.ckpt), a.lang, a.text);
  } else if (mode == "p2lg") {
    const auto tags = LanguageTags::defaults();
    p2lg = generate_p2lg(load_p2lg(a.ckpt), a.lang, a.prompt.empty() ? a.text : a.prompt, tags);
    pose = p2lg->pose;
  } else {
    fail(ErrorCode::BadConfig, "--mode must be mlsf or p2lg");
  }
  const fs::path out = a.out;
  const fs::path sidecar = a.out + ".ids";
  const auto files = pack_skels({PoseClip{a.id, pose}});
  write_file(out, files.skels);
  write_file(sidecar, files.sidecar);
  RunManifest m;
  m.command = "generate";
  m.args = {{"mode", mode}, {"lang", a.lang}, {"text", a.text}, {"prompt", a.prompt}, {"id", a.id}};
  m.inputs = {a.ckpt};
  m.outputs = {out, sidecar};
  if (p2lg) {
    ordered_json j;
    j["gloss"] = p2lg->gloss;
    ordered_json v = ordered_json::array();
    for (const auto& x : p2lg->violations) {
      ordered_json e;
      e["index"] = x.index;
      e["token"] = x.token;
      e["kind"] = x.kind == GlossViolationKind::CrossLanguage ? "cross_language" : "unprefixed";
      e["found_language"] = x.found_language ? ordered_json(*x.found_language) : ordered_json(nullptr);
      v.push_back(e);
    }
    j["violations"] = v;
    const fs::path gloss_path = a.out + ".gloss.json";
    write_file(gloss_path, j.dump(2) + "\n");
    m.outputs.push_back(gloss_path);
  }
  cli::write_manifest(manifest_beside(out), m);
}

struct EvaluateArgs {
  std::string fwd, rev, report, config;
  DataArgs data;
};

void run_evaluate(const EvaluateArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  const auto fwd = require_path(a.fwd, cfg, "ckpt", "--fwd");
  const auto report_path = require_path(a.report, cfg, "report", "--report");
  const auto rev = pick(a.rev, cfg, "reverse");
  if (rev.empty()) fail(ErrorCode::MissingReverseModel, "evaluate needs --rev");
  std::vector<fs::path> inputs{fwd, rev};
  const auto corpus = load_data(a.data, cfg, &inputs);
  const ReverseOracle oracle(motifs_from_archive(read_file(rev)));
  const PoseReader reader = [&](std::span<const float> pose, const std::string& lang) {
    return oracle.decode(pose, lang);
  };
  ScoreReport report;
  if (checkpoint_mode(fwd) == "mlsf") {
    const auto model = load_mlsf(fwd);
    Corpus subset;
    for (const auto& item : corpus)
      if (model.vocabs.count(item.language)) subset.push_back(item);
    if (subset.empty()) fail(ErrorCode::UnknownLanguage, "no clips in the checkpoint's languages");
    report = evaluate_mlsf(model, subset, reader, g.jobs);
  } else {
    const auto model = load_p2lg(fwd);
    report = evaluate_p2lg(model, corpus, reader, LanguageTags::defaults(), g.jobs);
  }
  write_file(report_path, to_json(report));
  RunManifest m;
  m.command = "evaluate";
  m.config = cfg;
  m.seed = cfg.seed;
  m.inputs = inputs;
  m.outputs = {report_path};
  cli::write_manifest(manifest_beside(report_path), m);
}

struct SynthArgs {
  std::string config, out, langs;
  std::optional<std::size_t> clips;
};

void run_synth(const SynthArgs& a, const Globals& g) {
  auto cfg = load_config(a.config, g);
  if (!a.langs.empty()) cfg.synth.languages = split_csv(a.langs);
  if (a.clips) cfg.synth.clips = *a.clips;
  cfg.synth.seed = cfg.seed;
  validate(cfg);
  const fs::path out = require_path(a.out, cfg, "out", "--out");
  const auto corpus = generate(cfg.synth);
  fs::create_directories(out);
  const auto files = pack_skels(pose_clips(corpus));
  write_file(out / "corpus.skels", files.skels);
  write_file(out / "corpus.skels.ids", files.sidecar);
  write_file(out / "transcripts.tsv", serialize_transcripts(transcripts(corpus)));
  write_file(out / "prompts.tsv", serialize_prompts(prompt_items(corpus)));
  std::vector<GlossItem> gloss;
  for (const auto& c : corpus.clips) gloss.push_back({c.id, c.language, c.gloss});
  write_file(out / "gloss.tsv", serialize_gloss(gloss));
  write_file(out / "reverse.sfca", serialize_motifs(corpus));
  RunManifest m;
  m.command = "synth";
  m.config = cfg;
  m.seed = cfg.seed;
  m.outputs = {out};
  cli::write_manifest(out / "manifest.json", m);
}

struct InspectArgs {
  bool structure = false;
  std::string skels, archive;
};

void run_inspect(const InspectArgs& a, const Globals&) {
  if (a.structure) std::cout << describe_structure(standard_structure());
  if (!a.skels.empty()) {
    for (const auto& info : inspect_skels(read_file(a.skels))) {
      ordered_json j;
      j["line"] = info.line;
      j["frames"] = info.frame_count;
      j["counters_ok"] = info.counters_ok;
      if (!info.problem.empty()) j["problem"] = info.problem;
      std::cout << j.dump() << "\n";
    }
  }
  if (!a.archive.empty()) {
    for (const auto& e : read_archive(read_file(a.archive))) {
      ordered_json j;
      j["key"] = e.key;
      j["frames"] = e.frame_count;
      j["width"] = e.width;
      std::cout << j.dump() << "\n";
    }
  }
  if (!a.structure && a.skels.empty() && a.archive.empty())
    fail(ErrorCode::BadConfig, "inspect needs --structure, --skels or --archive");
}

void emit_error(std::string_view code, std::string_view message, std::string_view command) {
  ordered_json j;
  j["error"] = code;
  j["message"] = message;
  j["command"] = command;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signforge: multilingual sign-language production toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Override the config seed");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "OpenPose JSON -> cleaned 2D clip archive");
  c_ingest->add_option("--input", ingest.input, "Clip directory, or a directory of clip directories");
  c_ingest->add_option("--out", ingest.out, "Output archive (.sfca)");
  c_ingest->add_option("--config", ingest.config, "Run config (JSON)");
  c_ingest->add_option("--clean", ingest.clean, "replace_median | replace_mean | drop_frame");
  c_ingest->add_option("--language", ingest.language, "Language tag for clips without a transcript row");
  c_ingest->add_option("--transcripts", ingest.transcripts, "Transcript TSV keyed by clip id");

  LiftArgs lift;
  auto* c_lift = app.add_subcommand("lift", "2D clip archive -> 3D poses");
  c_lift->add_option("--in", lift.in, "2D clip archive");
  c_lift->add_option("--out", lift.out, "Output directory");
  c_lift->add_option("--config", lift.config, "Run config (JSON)");
  c_lift->add_option("--percentile", lift.percentile, "Canonical bone length percentile");
  c_lift->add_option("--noise", lift.noise, "Root noise sigma");

  PackArgs pack;
  auto* c_pack = app.add_subcommand("pack", "3D pose archive -> .skels");
  c_pack->add_option("--in", pack.in, "Pose archive (poses.sfca)");
  c_pack->add_option("--out", pack.out, "Output .skels (ids go to <out>.ids)");

  PromptsArgs prompts;
  auto* c_prompts = app.add_subcommand("prompts", "Attach prompt templates to transcripts");
  c_prompts->add_option("--transcripts", prompts.transcripts, "Transcript TSV");
  c_prompts->add_option("--bank", prompts.bank, "Template bank (TAG<TAB>pattern)");
  c_prompts->add_option("--k", prompts.k, "Prompts per transcript")->check(CLI::PositiveNumber);
  c_prompts->add_option("--out", prompts.out, "Prompt TSV");
  c_prompts->add_option("--config", prompts.config, "Run config (JSON)");

  VocabArgs vocab;
  auto* c_vocab = app.add_subcommand("vocab", "Build a vocabulary file");
  c_vocab->add_option("--from", vocab.from, "transcripts | prompts | gloss");
  c_vocab->add_option("--in", vocab.in, "Input TSV");
  c_vocab->add_option("--out", vocab.out, "Output vocabulary");
  c_vocab->add_option("--size", vocab.size, "Maximum size including specials");
  c_vocab->add_flag("--langgloss", vocab.langgloss, "Prefix gloss tokens with their language");
  c_vocab->add_option("--config", vocab.config, "Run config (JSON)");

  TrainArgs train_args;
  auto* c_train = app.add_subcommand("train", "Train mlsf or p2lg models");
  c_train->add_option("--mode", train_args.mode, "mlsf | p2lg");
  c_train->add_option("--langs", train_args.langs, "Comma-separated language tags");
  c_train->add_option("--config", train_args.config, "Run config (JSON)");
  c_train->add_option("--data", train_args.data.data, "Corpus .skels");
  c_train->add_option("--sidecar", train_args.data.sidecar, "Clip ids (default <data>.ids)");
  c_train->add_option("--transcripts", train_args.data.transcripts, "Transcript TSV");
  c_train->add_option("--prompts", train_args.data.prompts, "Prompt TSV");
  c_train->add_option("--gloss", train_args.data.gloss, "Gloss TSV");
  c_train->add_option("--out", train_args.out, "Checkpoint directory");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate a pose sequence");
  c_gen->add_option("--ckpt", gen.ckpt, "Checkpoint directory");
  c_gen->add_option("--lang", gen.lang, "Language tag");
  c_gen->add_option("--text", gen.text, "Input text (mlsf)");
  c_gen->add_option("--prompt", gen.prompt, "Input prompt (p2lg)");
  c_gen->add_option("--mode", gen.mode, "mlsf | p2lg (default: from the checkpoint)");
  c_gen->add_option("--id", gen.id, "Clip id written to the sidecar");
  c_gen->add_option("--out", gen.out, "Output .skels");

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Back-translation scores");
  c_eval->add_option("--fwd", ev.fwd, "Forward checkpoint directory");
  c_eval->add_option("--rev", ev.rev, "Reverse model (reverse.sfca from synth)");
  c_eval->add_option("--data", ev.data.data, "Corpus .skels");
  c_eval->add_option("--sidecar", ev.data.sidecar, "Clip ids (default <data>.ids)");
  c_eval->add_option("--transcripts", ev.data.transcripts, "Transcript TSV");
  c_eval->add_option("--prompts", ev.data.prompts, "Prompt TSV");
  c_eval->add_option("--gloss", ev.data.gloss, "Gloss TSV");
  c_eval->add_option("--report", ev.report, "Report JSON");
  c_eval->add_option("--config", ev.config, "Run config (JSON)");

  SynthArgs syn;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic corpus");
  c_synth->add_option("--config", syn.config, "Run config (JSON)");
  c_synth->add_option("--out", syn.out, "Output directory");
  c_synth->add_option("--langs", syn.langs, "Comma-separated language tags");
  c_synth->add_option("--clips", syn.clips, "Clips per language");

  InspectArgs insp;
  auto* c_inspect = app.add_subcommand("inspect", "Print structure or file summaries");
  c_inspect->add_flag("--structure", insp.structure, "Joint and bone tables");
  c_inspect->add_option("--skels", insp.skels, "Scan a .skels file");
  c_inspect->add_option("--archive", insp.archive, "List archive entries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("BadConfig", e.what(), "");
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "ingest") run_ingest(ingest, g);
    else if (command == "lift") run_lift(lift, g);
    else if (command == "pack") run_pack(pack, g);
    else if (command == "prompts") run_prompts(prompts, g);
    else if (command == "vocab") run_vocab(vocab, g);
    else if (command == "train") run_train(train_args, g);
    else if (command == "generate") run_generate(gen, g);
    else if (command == "evaluate") run_evaluate(ev, g);
    else if (command == "synth") run_synth(syn, g);
    else if (command == "inspect") run_inspect(insp, g);
  } catch (const Error& e) {
    emit_error(to_string(e.code()), e.what(), command);
    return e.code() == ErrorCode::BadConfig ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    emit_error("Io", e.what(), command);
    return 1;
  } catch (const std::exception& e) {
    emit_error("Internal", e.what(), command);
    return 1;
  }
  return 0;
}
