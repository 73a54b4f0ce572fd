#include <doctest.h>

#include <random>

#include "signforge/langgloss.hpp"
#include "signforge/language.hpp"
#include "support.hpp"

using namespace signforge;
using test::code_of;

TEST_CASE("tokenize_text") {
  CHECK(tokenize_text("  Hello   world\t!") == std::vector<std::string>{"Hello", "world", "!"});
  CHECK(tokenize_text("Hello World", false) == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize_text("").empty());
}

TEST_CASE("vocab construction") {
  const auto v = build_vocab({{"b", "a", "b"}, {"c", "b", "a"}}, 6);
  REQUIRE(v.size() == 6);
  CHECK(v.token(kPadId) == "<pad>");
  CHECK(v.token(kUnkId) == "<unk>");
  CHECK(v.token(4) == "b");  // most frequent first
  CHECK(v.token(5) == "a");
  CHECK(v.id("c") == kUnkId);  // cut by max size
  CHECK(code_of([&] { v.token(99); }) == ErrorCode::UnknownToken);
  CHECK(code_of([] { build_vocab({{}}, 10); }) == ErrorCode::EmptyCorpus);
  CHECK(code_of([] { build_vocab({{"a"}}, 3); }) == ErrorCode::InvalidArgument);
  CHECK(parse_vocab(serialize_vocab(v)) == v);
}

TEST_CASE("case folding") {
  const auto v = build_vocab({{"Hello", "hello"}}, 10, false);
  CHECK(v.size() == 5);
  CHECK(v.find("HELLO").has_value());
  const auto s = build_vocab({{"Hello", "hello"}}, 10, true);
  CHECK(s.size() == 6);
  CHECK_FALSE(s.find("HELLO").has_value());
}

TEST_CASE("encode and decode") {
  const auto v = build_vocab({{"a", "b", "c"}}, 10);
  const auto e = encode({"a", "zzz", "c"}, v);
  REQUIRE(e.ids.size() == 5);
  CHECK(e.ids.front() == kBosId);
  CHECK(e.ids.back() == kEosId);
  CHECK(e.ids[2] == kUnkId);
  REQUIRE(e.unknown.size() == 1);
  CHECK(e.unknown[0].index == 1);
  CHECK(e.unknown[0].token == "zzz");
  CHECK(decode(e.ids, v) == std::vector<std::string>{"a", "<unk>", "c"});
  CHECK(decode({kBosId, 4, kEosId, 5}, v).size() == 1);
}

TEST_CASE("langgloss prefixing") {
  const auto tags = LanguageTags::defaults();
  CHECK(to_langgloss({"HELLO", "WORLD"}, "ASL", tags) ==
        std::vector<std::string>{"ASL_HELLO", "ASL_WORLD"});
  CHECK(code_of([&] { to_langgloss({"X"}, "XYZ", tags); }) == ErrorCode::UnknownLanguage);
  CHECK(code_of([&] { to_langgloss({"GSL_X"}, "ASL", tags); }) == ErrorCode::AlreadyPrefixed);

  const auto t = split_langgloss("LSF-CH_BON_JOUR", tags);
  REQUIRE(t.has_value());
  CHECK(t->language == "LSF-CH");
  CHECK(t->gloss == "BON_JOUR");
  CHECK(t->surface() == "LSF-CH_BON_JOUR");
  CHECK_FALSE(split_langgloss("NOPE_X", tags).has_value());
  CHECK_FALSE(split_langgloss("_X", tags).has_value());
}

TEST_CASE("violations") {
  const auto tags = LanguageTags::defaults();
  const auto v = detect_violation({"ASL_A", "GSL_B", "C", "ASL_D"}, "ASL", tags);
  REQUIRE(v.size() == 2);
  CHECK(v[0].index == 1);
  CHECK(v[0].kind == GlossViolationKind::CrossLanguage);
  CHECK(v[0].found_language == std::optional<std::string>("GSL"));
  CHECK(v[1].index == 2);
  CHECK(v[1].kind == GlossViolationKind::Unprefixed);
  CHECK_FALSE(v[1].found_language.has_value());
}

TEST_CASE("prefixed streams never violate") {
  const auto tags = LanguageTags::defaults();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto& lang = tags.tags()[rng() % tags.tags().size()];
    std::vector<std::string> gloss(1 + rng() % 8);
    for (auto& g : gloss) g = "W" + std::to_string(rng() % 50);
    CHECK(detect_violation(to_langgloss(gloss, lang, tags), lang, tags).empty());
  }
}

TEST_CASE("language tags") {
  auto tags = LanguageTags::defaults();
  CHECK(tags.tags().size() == 8);
  CHECK(tags.contains("DSGS"));
  CHECK(LanguageTags::well_formed("LIS-CH"));
  CHECK_FALSE(LanguageTags::well_formed("asl"));
  CHECK_FALSE(LanguageTags::well_formed("A_B"));
  tags.add("CSL");
  tags.add("CSL");
  CHECK(tags.tags().size() == 9);
  CHECK(code_of([&] { tags.add("bad tag"); }) == ErrorCode::InvalidArgument);
}
