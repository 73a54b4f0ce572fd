#include "signforge/language.hpp"

#include <algorithm>

#include "signforge/error.hpp"

namespace signforge {

LanguageTags LanguageTags::defaults() {
  return LanguageTags({"ASL", "GSL", "DSGS", "LSF-CH", "LIS-CH", "LSA", "KSL", "TSL"});
}

LanguageTags::LanguageTags(std::vector<std::string> tags) {
  for (auto& t : tags) add(std::move(t));
}

bool LanguageTags::contains(std::string_view tag) const noexcept {
  return std::find(tags_.begin(), tags_.end(), tag) != tags_.end();
}

void LanguageTags::add(std::string tag) {
  if (!well_formed(tag)) fail(ErrorCode::InvalidArgument, "malformed language tag '" + tag + "'");
  if (!contains(tag)) tags_.push_back(std::move(tag));
}

bool LanguageTags::well_formed(std::string_view tag) noexcept {
  if (tag.empty() || tag.front() == '-' || tag.back() == '-') return false;
  return std::all_of(tag.begin(), tag.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
  });
}

}  // namespace signforge
