#include "signforge/langgloss.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "signforge/error.hpp"
#include "signforge/format.hpp"

namespace signforge {

namespace {

const char* const kSpecials[kSpecialCount] = {"<pad>", "<bos>", "<eos>", "<unk>"};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_split_punct(unsigned char c) {
  return c < 0x80 && std::ispunct(c) && c != '_' && c != '-' && c != '\'';
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text, bool case_sensitive) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(case_sensitive ? cur : ascii_lower(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (is_split_punct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

Vocab::Vocab(std::vector<std::string> tokens, std::size_t max_size, bool case_sensitive)
    : tokens_(std::move(tokens)), max_size_(max_size), case_sensitive_(case_sensitive) {
  if (tokens_.size() < kSpecialCount)
    fail(ErrorCode::InvalidArgument, "vocabulary is missing special tokens");
  for (std::size_t i = 0; i < kSpecialCount; ++i)
    if (tokens_[i] != kSpecials[i])
      fail(ErrorCode::InvalidArgument, "vocabulary id " + std::to_string(i) + " must be " + kSpecials[i]);
  if (tokens_.size() > max_size_)
    fail(ErrorCode::InvalidArgument, "vocabulary exceeds its max size");
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (!index_.emplace(tokens_[i], i).second)
      fail(ErrorCode::InvalidArgument, "duplicate vocabulary token '" + tokens_[i] + "'");
}

std::string Vocab::normalize(std::string_view token) const {
  return case_sensitive_ ? std::string(token) : ascii_lower(token);
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(normalize(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id(std::string_view token) const { return find(token).value_or(kUnkId); }

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) fail(ErrorCode::UnknownToken, "token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& streams, std::size_t max_size,
                  bool case_sensitive) {
  if (max_size < kSpecialCount + 1)
    fail(ErrorCode::InvalidArgument, "vocabulary max size must be at least 5");
  std::map<std::string, std::size_t> freq;
  std::size_t total = 0;
  for (const auto& s : streams)
    for (const auto& tok : s) {
      ++freq[case_sensitive ? tok : ascii_lower(tok)];
      ++total;
    }
  if (total == 0) fail(ErrorCode::EmptyCorpus, "cannot build a vocabulary from an empty corpus");
  for (const char* sp : kSpecials) freq.erase(sp);

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens(std::begin(kSpecials), std::end(kSpecials));
  for (const auto& [tok, n] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(tok);
  }
  return Vocab(std::move(tokens), max_size, case_sensitive);
}

std::string serialize_vocab(const Vocab& v) {
  std::string out;
  for (const auto& t : v.tokens()) out += t + '\n';
  return out;
}

Vocab parse_vocab(std::string_view text, bool case_sensitive) {
  std::vector<std::string> tokens;
  for (auto line : split_lines(text)) tokens.emplace_back(line);
  const std::size_t n = tokens.size();
  return Vocab(std::move(tokens), n, case_sensitive);
}

Encoded encode(const std::vector<std::string>& tokens, const Vocab& vocab) {
  Encoded e;
  e.ids.reserve(tokens.size() + 2);
  e.ids.push_back(kBosId);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto id = vocab.find(tokens[i]);
    if (!id) e.unknown.push_back({i, tokens[i]});
    e.ids.push_back(id.value_or(kUnkId));
  }
  e.ids.push_back(kEosId);
  return e;
}

std::vector<std::string> decode(const std::vector<TokenId>& ids, const Vocab& vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == kEosId) break;
    if (ids[i] == kPadId || (i == 0 && ids[i] == kBosId)) continue;
    out.push_back(vocab.token(ids[i]));
  }
  return out;
}

std::optional<LangGlossToken> split_langgloss(std::string_view token, const LanguageTags& tags) {
  const std::size_t sep = token.find('_');
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  const std::string_view tag = token.substr(0, sep);
  if (!tags.contains(tag)) return std::nullopt;
  return LangGlossToken{std::string(tag), std::string(token.substr(sep + 1))};
}

std::vector<std::string> to_langgloss(const std::vector<std::string>& gloss,
                                      std::string_view language, const LanguageTags& tags) {
  if (!tags.contains(language))
    fail(ErrorCode::UnknownLanguage, "language '" + std::string(language) + "' is not registered");
  std::vector<std::string> out;
  out.reserve(gloss.size());
  for (std::size_t i = 0; i < gloss.size(); ++i) {
    if (split_langgloss(gloss[i], tags))
      fail(ErrorCode::AlreadyPrefixed,
           "token " + std::to_string(i) + " '" + gloss[i] + "' already carries a language prefix");
    out.push_back(std::string(language) + "_" + gloss[i]);
  }
  return out;
}

std::vector<GlossViolation> detect_violation(const std::vector<std::string>& stream,
                                             std::string_view expected_language,
                                             const LanguageTags& tags) {
  std::vector<GlossViolation> out;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto parsed = split_langgloss(stream[i], tags);
    if (!parsed)
      out.push_back({i, stream[i], std::nullopt, GlossViolationKind::Unprefixed});
    else if (parsed->language != expected_language)
      out.push_back({i, stream[i], parsed->language, GlossViolationKind::CrossLanguage});
  }
  return out;
}

}  // namespace signforge
