#include "signforge/prompts.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/language.hpp"
#include "signforge/parallel.hpp"

namespace signforge {

namespace {

std::size_t count_slots(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(kTextSlot); pos != std::string_view::npos;
       pos = s.find(kTextSlot, pos + kTextSlot.size()))
    ++n;
  return n;
}

}  // namespace

PromptTemplate make_template(std::string language, std::string pattern) {
  const std::size_t slots = count_slots(pattern);
  if (slots != 1)
    fail(ErrorCode::BadSlot, "template has " + std::to_string(slots) + " {Text} slots: " + pattern);
  return {std::move(language), std::move(pattern)};
}

void TemplateBank::add(PromptTemplate t) {
  if (count_slots(t.pattern) != 1) fail(ErrorCode::BadSlot, "template needs exactly one {Text}");
  auto& g = groups_[t.language];
  g.push_back(std::move(t));
}

const std::vector<PromptTemplate>& TemplateBank::group(std::string_view language) const {
  auto it = groups_.find(language);
  if (it == groups_.end())
    fail(ErrorCode::MissingLanguage, "no templates for language '" + std::string(language) + "'");
  return it->second;
}

bool TemplateBank::has(std::string_view language) const {
  return groups_.find(language) != groups_.end();
}

std::map<std::string, std::size_t> TemplateBank::counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [lang, g] : groups_) out[lang] = g.size();
  return out;
}

std::size_t TemplateBank::size() const {
  std::size_t n = 0;
  for (const auto& [lang, g] : groups_) n += g.size();
  return n;
}

TemplateBank parse_bank(std::string_view text, std::vector<BankIssue>* issues) {
  TemplateBank bank;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const std::size_t lineno = i + 1;
    auto report = [&](ErrorCode code, const std::string& msg) {
      if (!issues) fail(code, "line " + std::to_string(lineno) + ": " + msg);
      issues->push_back({lineno, msg});
    };
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      report(ErrorCode::InvalidArgument, "missing tab between language tag and pattern");
      continue;
    }
    std::string tag(line.substr(0, tab));
    std::string pattern(line.substr(tab + 1));
    if (!LanguageTags::well_formed(tag)) {
      report(ErrorCode::InvalidArgument, "malformed language tag '" + tag + "'");
      continue;
    }
    const std::size_t slots = count_slots(pattern);
    if (slots != 1) {
      report(ErrorCode::BadSlot, "expected exactly one {Text} slot, found " + std::to_string(slots));
      continue;
    }
    bank.add({std::move(tag), std::move(pattern)});
  }
  if (bank.empty()) fail(ErrorCode::NoTemplates, "template bank is empty");
  return bank;
}

TemplateBank load_bank(const std::filesystem::path& path, std::vector<BankIssue>* issues) {
  return parse_bank(read_file(path), issues);
}

std::string serialize_bank(const TemplateBank& bank) {
  std::string out;
  for (const auto& [lang, n] : bank.counts())
    for (const auto& t : bank.group(lang)) out += t.language + '\t' + t.pattern + '\n';
  return out;
}

std::string render(const PromptTemplate& t, std::string_view text) {
  const std::size_t pos = t.pattern.find(kTextSlot);
  if (pos == std::string::npos) fail(ErrorCode::BadSlot, "template has no {Text} slot");
  std::string out;
  out.reserve(t.pattern.size() + text.size());
  out.append(t.pattern, 0, pos);
  out.append(text);
  out.append(t.pattern, pos + kTextSlot.size());
  return out;
}

namespace {

// Partial Fisher-Yates over the group indices; the first draw is the same
// uniform pick associate() makes.
std::vector<std::size_t> draw_templates(std::size_t group_size, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(group_size);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    if (r < group_size) {
      std::uniform_int_distribution<std::size_t> pick(r, group_size - 1);
      std::swap(idx[r], idx[pick(rng)]);
      out.push_back(idx[r]);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, group_size - 1);
      out.push_back(pick(rng));
    }
  }
  return out;
}

}  // namespace

std::vector<PromptItem> augment(const std::vector<TranscriptItem>& corpus, const TemplateBank& bank,
                                std::size_t k, std::uint64_t seed) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "augment needs k >= 1");
  std::vector<PromptItem> out;
  out.reserve(corpus.size() * k);
  for (const auto& item : corpus) {
    const auto& group = bank.group(item.language);
    std::mt19937_64 rng(derive_seed(seed, item.id));
    const auto picks = draw_templates(group.size(), k, rng);
    for (std::size_t r = 0; r < k; ++r) {
      PromptItem p;
      p.id = k == 1 ? item.id : item.id + "#" + std::to_string(r);
      p.language = item.language;
      p.template_index = picks[r];
      p.prompt = render(group[picks[r]], item.transcript);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PromptItem> associate(const std::vector<TranscriptItem>& corpus,
                                  const TemplateBank& bank, std::uint64_t seed) {
  return augment(corpus, bank, 1, seed);
}

std::vector<TranscriptItem> parse_transcripts(std::string_view tsv) {
  std::vector<TranscriptItem> out;
  const auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i].front() == '#') continue;
    const auto f = split_on(lines[i], '\t');
    if (f.size() != 3)
      fail(ErrorCode::InvalidArgument, "transcripts line " + std::to_string(i + 1) +
                                           ": expected id<TAB>language<TAB>transcript");
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2])});
  }
  return out;
}

std::string serialize_transcripts(const std::vector<TranscriptItem>& items) {
  std::string out;
  for (const auto& t : items) out += t.id + '\t' + t.language + '\t' + t.transcript + '\n';
  return out;
}

std::vector<PromptItem> parse_prompts(std::string_view tsv) {
  std::vector<PromptItem> out;
  const auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i].front() == '#') continue;
    const auto f = split_on(lines[i], '\t');
    if (f.size() != 3)
      fail(ErrorCode::InvalidArgument, "prompts line " + std::to_string(i + 1) +
                                           ": expected id<TAB>language<TAB>prompt");
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), 0});
  }
  return out;
}

std::string serialize_prompts(const std::vector<PromptItem>& items) {
  std::string out;
  for (const auto& p : items) out += p.id + '\t' + p.language + '\t' + p.prompt + '\n';
  return out;
}

TemplateBank builtin_bank(const std::vector<std::string>& languages) {
  static const char* english[] = {
      "I really want to learn how to say \"{Text}\" in sign language. Can you help me?",
      "How would you express \"{Text}\" in sign language?",
      "Can you show me how to say \"{Text}\" in sign language?",
      "How do I say \"{Text}\" in sign language?",
      "Could you tell me how \"{Text}\" is represented in sign language?",
      "What is the sign language for \"{Text}\"?",
  };
  static const char* german[] = {
      "Ich möchte wirklich lernen wie man \"{Text}\" in Gebärdensprache sagt. Können Sie mir helfen?",
      "Wie würden Sie \"{Text}\" in Gebärdensprache ausdrücken?",
      "Können Sie mir zeigen wie man \"{Text}\" mit Gebärdensprache sagt?",
      "Wie sage ich \"{Text}\" in Gebärdensprache?",
      "Könnten Sie mir sagen wie \"{Text}\" in Gebärdensprache dargestellt wird?",
      "Was ist die Gebärdensprache für \"{Text}\"?",
  };
  TemplateBank bank;
  for (const auto& lang : languages) {
    const auto& pool = lang == "GSL" ? german : english;
    for (const char* p : pool) bank.add(make_template(lang, p));
  }
  return bank;
}

}  // namespace signforge
