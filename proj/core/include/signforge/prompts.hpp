#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace signforge {

inline constexpr std::string_view kTextSlot = "{Text}";

struct PromptTemplate {
  std::string language;
  std::string pattern;  // exactly one {Text}
};

// Throws BadSlot when `pattern` has zero or several slots.
PromptTemplate make_template(std::string language, std::string pattern);

class TemplateBank {
 public:
  void add(PromptTemplate t);

  const std::vector<PromptTemplate>& group(std::string_view language) const;
  bool has(std::string_view language) const;
  std::map<std::string, std::size_t> counts() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  std::map<std::string, std::vector<PromptTemplate>, std::less<>> groups_;
};

struct BankIssue {
  std::size_t line = 0;
  std::string message;
};

// One template per line: "<TAG>\t<pattern>". Blank lines and lines starting
// with '#' are skipped. Bad lines throw BadSlot / InvalidArgument naming the
// line, unless `issues` is given, in which case they are collected and
// skipped. An empty result throws NoTemplates.
TemplateBank parse_bank(std::string_view text, std::vector<BankIssue>* issues = nullptr);
TemplateBank load_bank(const std::filesystem::path& path, std::vector<BankIssue>* issues = nullptr);
std::string serialize_bank(const TemplateBank& bank);

std::string render(const PromptTemplate& t, std::string_view text);

struct TranscriptItem {
  std::string id;
  std::string language;
  std::string transcript;
};

struct PromptItem {
  std::string id;
  std::string language;
  std::string prompt;
  std::size_t template_index = 0;  // within the language group
};

// Each item draws its template uniformly from its language group using a
// generator seeded from (seed, item id). Throws MissingLanguage.
std::vector<PromptItem> associate(const std::vector<TranscriptItem>& corpus,
                                  const TemplateBank& bank, std::uint64_t seed);

// k prompts per item, with distinct templates whenever the group is large
// enough. For k = 1 the output equals associate().
std::vector<PromptItem> augment(const std::vector<TranscriptItem>& corpus, const TemplateBank& bank,
                                std::size_t k, std::uint64_t seed);

// TSV helpers: transcripts are "id\tlanguage\ttranscript", prompts are
// "id\tlanguage\tprompt".
std::vector<TranscriptItem> parse_transcripts(std::string_view tsv);
std::string serialize_transcripts(const std::vector<TranscriptItem>& items);
std::vector<PromptItem> parse_prompts(std::string_view tsv);
std::string serialize_prompts(const std::vector<PromptItem>& items);

// A small built-in bank (English for ASL and most tags, German for GSL).
TemplateBank builtin_bank(const std::vector<std::string>& languages);

}  // namespace signforge
