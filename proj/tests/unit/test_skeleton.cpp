#include <doctest.h>

#include <cmath>
#include <set>

#include "signforge/skeleton.hpp"

using namespace signforge;

TEST_CASE("standard structure is a rooted spanning tree") {
  const auto& s = standard_structure();
  CHECK(s.bone_count() == 49);
  CHECK(s.root == JointLayout::kNeck);
  CHECK(check_structure(s).empty());

  std::set<std::size_t> children, lines;
  std::set<std::size_t> reached{s.root};
  for (const auto& b : s.bones) {
    CHECK(b.a != b.b);
    CHECK(reached.count(b.a) == 1);  // parents first
    CHECK(children.insert(b.b).second);
    reached.insert(b.b);
    lines.insert(b.line);
  }
  CHECK(children.size() == 49);
  CHECK(children.count(s.root) == 0);
  CHECK(lines.size() == 49);
  CHECK(*lines.rbegin() == 48);
  CHECK(&standard_structure() == &s);
}

TEST_CASE("layout ranges partition the joints") {
  CHECK(JointLayout::kBodyEnd == JointLayout::kRightHandBegin);
  CHECK(JointLayout::kRightHandEnd == JointLayout::kLeftHandBegin);
  CHECK(JointLayout::kLeftHandEnd == JointLayout::kJointCount);
  CHECK(JointLayout::kRightHandEnd - JointLayout::kRightHandBegin == 21);
  CHECK(JointLayout::names()[JointLayout::kNeck] == "neck");
  CHECK(kPoseWidth == 150);
}

TEST_CASE("check_structure reports broken trees") {
  BoneStructure s = standard_structure();
  s.bones.pop_back();
  CHECK_FALSE(check_structure(s).empty());

  BoneStructure swapped = standard_structure();
  std::swap(swapped.bones[0], swapped.bones.back());
  CHECK_FALSE(check_structure(swapped).empty());
}

TEST_CASE("validate_clip") {
  Clip2D clip;
  clip.id = "c";
  clip.frames.resize(3);
  for (auto& f : clip.frames)
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) f.w[j] = 1.0;
  CHECK(validate_clip(clip).empty());

  clip.frames[1].x[7] = std::nan("");
  auto v = validate_clip(clip);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::NonFinite);
  CHECK(v[0].frame == 1u);
  CHECK(v[0].joint == 7u);

  clip.frames[1].x[7] = 0.0;
  clip.frames[2].x.resize(49);
  v = validate_clip(clip);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].kind == ViolationKind::Structural);
}

TEST_CASE("flatten interleaves joints") {
  Pose3DClip p;
  p.frames.resize(2);
  p.frames[1].x[2] = 1.5;
  p.frames[1].y[2] = 2.5;
  p.frames[1].z[2] = 3.5;
  const auto v = flatten(p);
  REQUIRE(v.size() == 300);
  CHECK(v[150 + 6] == 1.5f);
  CHECK(v[150 + 7] == 2.5f);
  CHECK(v[150 + 8] == 3.5f);
}

TEST_CASE("describe_structure lists every joint and bone") {
  const auto text = describe_structure(standard_structure());
  CHECK(text.find("neck") != std::string::npos);
  CHECK(text.find("# bones (49)") != std::string::npos);
}
