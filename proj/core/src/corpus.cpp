#include "signforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "signforge/error.hpp"
#include "signforge/format.hpp"

namespace signforge {

namespace {

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

std::vector<float> framed(const std::vector<float>& pose) { return with_counters(pose); }

}  // namespace

Corpus from_synth(const SynthCorpus& synth) {
  Corpus out;
  out.reserve(synth.clips.size());
  for (const auto& c : synth.clips)
    out.push_back({c.id, c.language, c.transcript, c.gloss, c.prompt, c.pose});
  return out;
}

std::string serialize_gloss(const std::vector<GlossItem>& items) {
  std::string out;
  for (const auto& g : items) {
    out += g.id + '\t' + g.language + '\t';
    for (std::size_t i = 0; i < g.gloss.size(); ++i) out += (i ? " " : "") + g.gloss[i];
    out += '\n';
  }
  return out;
}

std::vector<GlossItem> parse_gloss(std::string_view tsv) {
  std::vector<GlossItem> out;
  std::size_t line_no = 0;
  for (auto line : split_lines(tsv)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_on(line, '\t');
    if (cols.size() != 3)
      fail(ErrorCode::MalformedDocument,
           "gloss line " + std::to_string(line_no) + ": expected 3 tab-separated columns");
    GlossItem g{std::string(cols[0]), std::string(cols[1]), {}};
    for (auto t : split_spaces(cols[2])) g.gloss.emplace_back(t);
    out.push_back(std::move(g));
  }
  return out;
}

Corpus join_corpus(const std::vector<PoseClip>& clips, const std::vector<TranscriptItem>& transcripts,
                   const std::vector<PromptItem>& prompts, const std::vector<GlossItem>& gloss) {
  std::unordered_map<std::string, const TranscriptItem*> by_id;
  for (const auto& t : transcripts) by_id[t.id] = &t;
  std::unordered_map<std::string, const PromptItem*> prompt_by_id;
  for (const auto& p : prompts) prompt_by_id.emplace(p.id, &p);
  std::unordered_map<std::string, const GlossItem*> gloss_by_id;
  for (const auto& g : gloss) gloss_by_id[g.id] = &g;

  Corpus out;
  out.reserve(clips.size());
  for (const auto& clip : clips) {
    auto it = by_id.find(clip.id);
    if (it == by_id.end())
      fail(ErrorCode::MalformedDocument, "clip '" + clip.id + "' has no transcript");
    CorpusItem item;
    item.id = clip.id;
    item.language = it->second->language;
    item.transcript = it->second->transcript;
    item.pose = clip.frames;
    if (auto g = gloss_by_id.find(clip.id); g != gloss_by_id.end()) {
      item.gloss = g->second->gloss;
    } else {
      for (auto t : split_spaces(item.transcript)) item.gloss.push_back(upper(std::string(t)));
    }
    if (auto p = prompt_by_id.find(clip.id); p != prompt_by_id.end()) item.prompt = p->second->prompt;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::string> languages_of(const Corpus& c) {
  std::set<std::string> s;
  for (const auto& i : c) s.insert(i.language);
  return {s.begin(), s.end()};
}

Corpus filter_language(const Corpus& c, std::string_view language) {
  Corpus out;
  for (const auto& i : c)
    if (i.language == language) out.push_back(i);
  return out;
}

Vocab transcript_vocab(const Corpus& c, std::size_t max_size, bool case_sensitive) {
  std::vector<std::vector<std::string>> streams;
  for (const auto& i : c) streams.push_back(tokenize_text(i.transcript, case_sensitive));
  return build_vocab(streams, max_size, case_sensitive);
}

std::vector<TrainSample> transcript_pose_samples(const Corpus& c, const Vocab& vocab) {
  std::vector<TrainSample> out;
  out.reserve(c.size());
  for (const auto& i : c) {
    TrainSample s;
    s.id = i.id;
    s.source = encode(tokenize_text(i.transcript, vocab.case_sensitive()), vocab).ids;
    s.target_frames = framed(i.pose);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> item_langgloss(const CorpusItem& item, const LanguageTags& tags) {
  return to_langgloss(item.gloss, item.language, tags);
}

Vocab prompt_vocab(const Corpus& c, std::size_t max_size, bool case_sensitive) {
  std::vector<std::vector<std::string>> streams;
  for (const auto& i : c) {
    if (i.prompt.empty())
      fail(ErrorCode::MalformedDocument, "clip '" + i.id + "' has no prompt");
    streams.push_back(tokenize_text(i.prompt, case_sensitive));
  }
  return build_vocab(streams, max_size, case_sensitive);
}

Vocab langgloss_vocab(const Corpus& c, std::size_t max_size, const LanguageTags& tags) {
  std::vector<std::vector<std::string>> streams;
  for (const auto& i : c) streams.push_back(item_langgloss(i, tags));
  return build_vocab(streams, max_size, true);
}

std::vector<TrainSample> prompt_gloss_samples(const Corpus& c, const Vocab& prompts,
                                              const Vocab& gloss, const LanguageTags& tags) {
  std::vector<TrainSample> out;
  out.reserve(c.size());
  for (const auto& i : c) {
    TrainSample s;
    s.id = i.id;
    s.source = encode(tokenize_text(i.prompt, prompts.case_sensitive()), prompts).ids;
    s.target_tokens = encode(item_langgloss(i, tags), gloss).ids;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TrainSample> gloss_pose_samples(const Corpus& c, const Vocab& gloss,
                                            const LanguageTags& tags) {
  std::vector<TrainSample> out;
  out.reserve(c.size());
  for (const auto& i : c) {
    TrainSample s;
    s.id = i.id;
    s.source = encode(item_langgloss(i, tags), gloss).ids;
    s.target_frames = framed(i.pose);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EvalItem> eval_items(const Corpus& c, bool case_sensitive) {
  std::vector<EvalItem> out;
  out.reserve(c.size());
  for (const auto& i : c)
    out.push_back({i.id, i.language, metric_tokens(i.transcript, case_sensitive), i.pose});
  return out;
}

}  // namespace signforge
