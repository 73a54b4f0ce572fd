#include "signforge/config.hpp"

#include <set>

#include <json.hpp>

#include "signforge/error.hpp"
#include "signforge/format.hpp"

namespace signforge {

using nlohmann::json;
using nlohmann::ordered_json;

TrainMode parse_train_mode(std::string_view s) {
  if (s == "mlsf") return TrainMode::Mlsf;
  if (s == "p2lg") return TrainMode::P2lg;
  fail(ErrorCode::BadConfig, "mode must be mlsf or p2lg");
}

std::string_view to_string(TrainMode m) { return m == TrainMode::Mlsf ? "mlsf" : "p2lg"; }

RunConfig::RunConfig() {
  training.batch_size = 16;
  training.lr = 1e-3;
  training.epochs = 300;
  training.plc_enabled = false;
  training.loss_mode = LossMode::MSE;
}

namespace {

const std::set<std::string> kPathKeys{"data",   "sidecar", "transcripts", "prompts", "gloss",
                                      "bank",   "out",     "ckpt",        "reverse", "report"};

// Reads the keys of one JSON object, rejecting anything not consumed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(ErrorCode::BadConfig, "'" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) fail(ErrorCode::BadConfig, "unknown key '" + path(k) + "'");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::BadConfig, "key '" + path(key) + "' has the wrong type");
    }
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json* child(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> used_;
};

void read_model(const json& j, ModelConfig& m) {
  Section s(j, "model");
  std::string size = std::string(to_string(m.size_class));
  s.get("size_class", size);
  const auto cls = parse_size_class(size);
  if (s.has("size_class")) m = ModelConfig::for_size(cls);
  s.get("layers", m.layers);
  s.get("heads", m.heads);
  s.get("embed_dim", m.embed_dim);
  s.get("hidden_dim", m.hidden_dim);
  s.get("ffn_dim", m.ffn_dim);
  s.get("max_sent_length", m.max_sent_length);
  s.get("dropout", m.dropout);
}

ordered_json model_json(const ModelConfig& m) {
  ordered_json j;
  j["size_class"] = std::string(to_string(m.size_class));
  j["layers"] = m.layers;
  j["heads"] = m.heads;
  j["embed_dim"] = m.embed_dim;
  j["hidden_dim"] = m.hidden_dim;
  j["ffn_dim"] = m.ffn_dim;
  j["max_sent_length"] = m.max_sent_length;
  j["dropout"] = m.dropout;
  return j;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section top(doc, "");
    top.get("seed", c.seed);
    if (const json* m = top.child("model")) read_model(*m, c.model);
    if (const json* v = top.child("vocab")) {
      Section s(*v, "vocab");
      s.get("size", c.vocab.max_size);
      s.get("case_sensitive", c.vocab.case_sensitive);
    }
    if (const json* t = top.child("training")) {
      Section s(*t, "training");
      auto& r = c.training;
      std::string mode(to_string(c.mode)), loss(to_string(r.loss_mode)),
          opt(to_string(r.optimizer)), nsp(to_string(r.new_sample_priority));
      s.get("mode", mode);
      s.get("languages", c.languages);
      s.get("loss_mode", loss);
      s.get("optimizer", opt);
      s.get("lr", r.lr);
      s.get("lr_decay", r.lr_decay);
      s.get("lr_floor", r.lr_floor);
      s.get("batch_size", r.batch_size);
      s.get("epochs", r.epochs);
      s.get("max_steps", r.max_steps);
      s.get("plc", r.plc_enabled);
      s.get("eta", r.eta);
      s.get("new_sample_priority", nsp);
      s.get("counter_weight", r.counter_weight);
      s.get("eval_every", c.eval_every);
      c.mode = parse_train_mode(mode);
      r.loss_mode = parse_loss_mode(loss);
      r.optimizer = parse_optimizer(opt);
      r.new_sample_priority = parse_new_sample_priority(nsp);
    }
    if (const json* l = top.child("lift")) {
      Section s(*l, "lift");
      s.get("percentile", c.lift.percentile);
      s.get("noise_sigma", c.lift.noise_sigma);
    }
    if (const json* cl = top.child("clean")) {
      Section s(*cl, "clean");
      std::string mode = "replace_median";
      s.get("mode", mode);
      try {
        c.clean.mode = parse_clean_mode(mode);
      } catch (const Error& e) {
        fail(ErrorCode::BadConfig, e.what());
      }
      s.get("invalid_frame_threshold", c.clean.invalid_frame_threshold);
      s.get("zero_coordinates_invalid", c.clean.zero_coordinates_invalid);
    }
    if (const json* sy = top.child("synth")) {
      Section s(*sy, "synth");
      s.get("languages", c.synth.languages);
      s.get("vocab_per_language", c.synth.vocab_per_language);
      s.get("clips", c.synth.clips);
      s.get("min_frames", c.synth.min_frames);
      s.get("max_frames", c.synth.max_frames);
      s.get("motif_amplitude", c.synth.motif_amplitude);
    }
    if (const json* p = top.child("paths")) {
      if (!p->is_object()) fail(ErrorCode::BadConfig, "'paths' must be an object");
      for (const auto& [k, v] : p->items()) {
        if (!kPathKeys.count(k)) fail(ErrorCode::BadConfig, "unknown key 'paths." + k + "'");
        if (!v.is_string()) fail(ErrorCode::BadConfig, "key 'paths." + k + "' must be a string");
        c.paths[k] = v.get<std::string>();
      }
    }
  }
  validate(c);
  return c;
}

namespace {

template <class F>
void as_config_error(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadConfig) throw;
    fail(ErrorCode::BadConfig, e.what());
  }
}

}  // namespace

void validate(const RunConfig& c) {
  validate(c.model);
  validate(c.training);
  if (c.vocab.max_size < kSpecialCount + 1) fail(ErrorCode::BadConfig, "vocab.size must be >= 5");
  as_config_error([&] { validate(c.lift); });
  if (!(c.clean.invalid_frame_threshold >= 0.0 && c.clean.invalid_frame_threshold <= 1.0))
    fail(ErrorCode::BadConfig, "clean.invalid_frame_threshold must lie in [0,1]");
  as_config_error([&] { validate(c.synth); });
  for (const auto& l : c.languages)
    if (!LanguageTags::well_formed(l)) fail(ErrorCode::BadConfig, "malformed language tag '" + l + "'");
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["model"] = model_json(c.model);
  j["vocab"] = {{"size", c.vocab.max_size}, {"case_sensitive", c.vocab.case_sensitive}};
  const auto& r = c.training;
  ordered_json t;
  t["mode"] = std::string(to_string(c.mode));
  t["languages"] = c.languages;
  t["loss_mode"] = std::string(to_string(r.loss_mode));
  t["optimizer"] = std::string(to_string(r.optimizer));
  t["lr"] = r.lr;
  t["lr_decay"] = r.lr_decay;
  t["lr_floor"] = r.lr_floor;
  t["batch_size"] = r.batch_size;
  t["epochs"] = r.epochs;
  t["max_steps"] = r.max_steps;
  t["plc"] = r.plc_enabled;
  t["eta"] = r.eta;
  t["new_sample_priority"] = std::string(to_string(r.new_sample_priority));
  t["counter_weight"] = r.counter_weight;
  t["eval_every"] = c.eval_every;
  j["training"] = t;
  j["lift"] = {{"percentile", c.lift.percentile}, {"noise_sigma", c.lift.noise_sigma}};
  const char* mode = c.clean.mode == CleanMode::ReplaceMedian ? "replace_median"
                     : c.clean.mode == CleanMode::ReplaceMean ? "replace_mean"
                                                              : "drop_frame";
  ordered_json cl;
  cl["mode"] = mode;
  cl["invalid_frame_threshold"] = c.clean.invalid_frame_threshold;
  cl["zero_coordinates_invalid"] = c.clean.zero_coordinates_invalid;
  j["clean"] = cl;
  ordered_json sy;
  sy["languages"] = c.synth.languages;
  sy["vocab_per_language"] = c.synth.vocab_per_language;
  sy["clips"] = c.synth.clips;
  sy["min_frames"] = c.synth.min_frames;
  sy["max_frames"] = c.synth.max_frames;
  sy["motif_amplitude"] = c.synth.motif_amplitude;
  j["synth"] = sy;
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : c.paths) p[k] = v;
  j["paths"] = p;
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& c) { return hex_digest(to_json(c)); }

std::string model_config_json(const ModelConfig& c) { return model_json(c).dump(2) + "\n"; }

ModelConfig parse_model_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::BadConfig, std::string("model config is not valid JSON: ") + e.what());
  }
  ModelConfig m;
  read_model(doc, m);
  validate(m);
  return m;
}

}  // namespace signforge
