#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace signforge {

// Registered sign-language tags. Tags are uppercase ASCII identifiers that
// may contain hyphens (LSF-CH) but never underscores, since '_' separates
// the tag from the gloss in LangGloss tokens.
class LanguageTags {
 public:
  // ASL, GSL, DSGS, LSF-CH, LIS-CH, LSA, KSL, TSL
  static LanguageTags defaults();

  explicit LanguageTags(std::vector<std::string> tags);

  bool contains(std::string_view tag) const noexcept;
  const std::vector<std::string>& tags() const noexcept { return tags_; }

  // Throws InvalidArgument for malformed tags; no-op for existing ones.
  void add(std::string tag);

  static bool well_formed(std::string_view tag) noexcept;

 private:
  std::vector<std::string> tags_;
};

}  // namespace signforge
