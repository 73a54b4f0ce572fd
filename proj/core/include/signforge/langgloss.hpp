#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "signforge/language.hpp"

namespace signforge {

using TokenId = std::size_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr std::size_t kSpecialCount = 4;

// Whitespace split with ASCII punctuation and quotes split off as their own
// tokens; lowercases when !case_sensitive.
std::vector<std::string> tokenize_text(std::string_view text, bool case_sensitive = true);

class Vocab {
 public:
  Vocab(std::vector<std::string> tokens, std::size_t max_size, bool case_sensitive);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t max_size() const noexcept { return max_size_; }
  bool case_sensitive() const noexcept { return case_sensitive_; }

  std::optional<TokenId> find(std::string_view token) const;
  TokenId id(std::string_view token) const;  // kUnkId when absent
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::string normalize(std::string_view token) const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_ && a.case_sensitive_ == b.case_sensitive_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_size_;
  bool case_sensitive_;
};

// Frequency-ranked (ties lexicographic) up to max_size - 4 regular tokens.
// Throws EmptyCorpus; max_size < 5 throws InvalidArgument.
Vocab build_vocab(const std::vector<std::vector<std::string>>& streams, std::size_t max_size,
                  bool case_sensitive = true);

// One token per line; line number = id. The first four lines are specials.
std::string serialize_vocab(const Vocab& v);
Vocab parse_vocab(std::string_view text, bool case_sensitive = true);

struct OutOfVocab {
  std::size_t index;  // position in the input token list
  std::string token;
};

struct Encoded {
  std::vector<TokenId> ids;  // <bos> ... <eos>
  std::vector<OutOfVocab> unknown;
};

Encoded encode(const std::vector<std::string>& tokens, const Vocab& vocab);
// Skips a leading <bos> and <pad>s, stops at the first <eos>.
std::vector<std::string> decode(const std::vector<TokenId>& ids, const Vocab& vocab);

struct LangGlossToken {
  std::string language;
  std::string gloss;
  std::string surface() const { return language + "_" + gloss; }
};

// Splits "<TAG>_<gloss>" when TAG is registered.
std::optional<LangGlossToken> split_langgloss(std::string_view token, const LanguageTags& tags);

// Throws UnknownLanguage for an unregistered tag and AlreadyPrefixed when a
// token already carries a registered prefix.
std::vector<std::string> to_langgloss(const std::vector<std::string>& gloss,
                                      std::string_view language, const LanguageTags& tags);

enum class GlossViolationKind { CrossLanguage, Unprefixed };

struct GlossViolation {
  std::size_t index;
  std::string token;
  std::optional<std::string> found_language;  // empty for Unprefixed
  GlossViolationKind kind;
};

std::vector<GlossViolation> detect_violation(const std::vector<std::string>& stream,
                                             std::string_view expected_language,
                                             const LanguageTags& tags);

}  // namespace signforge
