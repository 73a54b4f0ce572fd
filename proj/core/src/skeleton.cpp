#include "signforge/skeleton.hpp"

#include <cmath>
#include <sstream>

namespace signforge {

namespace {

std::array<std::string, JointLayout::kJointCount> make_names() {
  std::array<std::string, JointLayout::kJointCount> n;
  const char* body[] = {"nose",       "neck",    "r_shoulder", "r_elbow",
                        "r_wrist",    "l_shoulder", "l_elbow", "l_wrist"};
  for (std::size_t i = 0; i < 8; ++i) n[i] = body[i];
  const char* fingers[] = {"thumb", "index", "middle", "ring", "pinky"};
  auto fill_hand = [&](std::size_t base, const std::string& side) {
    n[base] = side + "_hand_root";
    for (std::size_t f = 0; f < 5; ++f)
      for (std::size_t k = 0; k < 4; ++k)
        n[base + 1 + 4 * f + k] = side + "_" + fingers[f] + std::to_string(k + 1);
  };
  fill_hand(JointLayout::kRightHandBegin, "r");
  fill_hand(JointLayout::kLeftHandBegin, "l");
  return n;
}

BoneStructure make_structure() {
  using J = JointLayout;
  BoneStructure s;
  s.root = J::kNeck;
  auto add = [&](std::size_t a, std::size_t b) {
    s.bones.push_back({a, b, s.bones.size()});
  };
  add(J::kNeck, J::kNose);
  add(J::kNeck, J::kRShoulder);
  add(J::kRShoulder, J::kRElbow);
  add(J::kRElbow, J::kRWrist);
  add(J::kNeck, J::kLShoulder);
  add(J::kLShoulder, J::kLElbow);
  add(J::kLElbow, J::kLWrist);
  add(J::kRWrist, J::kRightHandBegin);
  add(J::kLWrist, J::kLeftHandBegin);
  for (std::size_t hand : {J::kRightHandBegin, J::kLeftHandBegin}) {
    for (std::size_t f = 0; f < 5; ++f) {
      std::size_t parent = hand;
      for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t child = hand + 1 + 4 * f + k;
        add(parent, child);
        parent = child;
      }
    }
  }
  return s;
}

}  // namespace

const std::array<std::string, JointLayout::kJointCount>& JointLayout::names() {
  static const auto table = make_names();
  return table;
}

const BoneStructure& standard_structure() {
  static const BoneStructure s = make_structure();
  return s;
}

std::vector<std::string> check_structure(const BoneStructure& s) {
  constexpr std::size_t n = JointLayout::kJointCount;
  std::vector<std::string> problems;
  if (s.root >= n) problems.push_back("root out of range");
  if (s.bones.size() != n - 1)
    problems.push_back("expected " + std::to_string(n - 1) + " bones, got " +
                       std::to_string(s.bones.size()));
  std::vector<bool> placed(n, false);
  std::vector<int> as_child(n, 0);
  if (s.root < n) placed[s.root] = true;
  for (std::size_t k = 0; k < s.bones.size(); ++k) {
    const Bone& bone = s.bones[k];
    const std::string tag = "bone " + std::to_string(k);
    if (bone.a >= n || bone.b >= n) {
      problems.push_back(tag + ": joint index out of range");
      continue;
    }
    if (bone.a == bone.b) problems.push_back(tag + ": self loop");
    if (bone.line >= s.bones.size()) problems.push_back(tag + ": line out of range");
    if (!placed[bone.a]) problems.push_back(tag + ": parent visited before being placed");
    if (bone.b == s.root) problems.push_back(tag + ": root used as child");
    ++as_child[bone.b];
    placed[bone.b] = true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == s.root) continue;
    if (as_child[j] != 1)
      problems.push_back("joint " + std::to_string(j) + " appears " +
                         std::to_string(as_child[j]) + " times as a child");
  }
  return problems;
}

std::vector<float> flatten(const Pose3DClip& clip) {
  std::vector<float> out;
  out.reserve(clip.frames.size() * kPoseWidth);
  for (const auto& f : clip.frames)
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
      out.push_back(static_cast<float>(f.x[j]));
      out.push_back(static_cast<float>(f.y[j]));
      out.push_back(static_cast<float>(f.z[j]));
    }
  return out;
}

std::vector<float> flatten(const Clip2D& clip) {
  std::vector<float> out;
  out.reserve(clip.frames.size() * kPoseWidth);
  for (const auto& f : clip.frames)
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
      out.push_back(static_cast<float>(f.x[j]));
      out.push_back(static_cast<float>(f.y[j]));
      out.push_back(static_cast<float>(f.w[j]));
    }
  return out;
}

std::vector<Violation> validate_clip(const Clip2D& clip) {
  constexpr std::size_t n = JointLayout::kJointCount;
  std::vector<Violation> out;
  if (clip.frames.empty())
    out.push_back({ViolationKind::Structural, std::nullopt, std::nullopt, "clip has no frames"});
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const Frame2D& f = clip.frames[t];
    if (f.x.size() != n || f.y.size() != n || f.w.size() != n) {
      std::ostringstream os;
      os << "frame " << t << ": array lengths x=" << f.x.size() << " y=" << f.y.size()
         << " w=" << f.w.size() << ", expected " << n;
      out.push_back({ViolationKind::Structural, t, std::nullopt, os.str()});
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(f.x[j]) || !std::isfinite(f.y[j]) || !std::isfinite(f.w[j])) {
        out.push_back({ViolationKind::NonFinite, t, j,
                       "frame " + std::to_string(t) + " joint " + std::to_string(j) +
                           " (" + JointLayout::names()[j] + "): non-finite value"});
      } else if (f.w[j] == 0.0) {
        out.push_back({ViolationKind::ZeroConfidence, t, j,
                       "frame " + std::to_string(t) + " joint " + std::to_string(j) +
                           " (" + JointLayout::names()[j] + "): zero confidence"});
      }
    }
  }
  return out;
}

std::string describe_structure(const BoneStructure& s) {
  std::ostringstream os;
  os << "# joints (" << JointLayout::kJointCount << ")\n";
  os << "index\tname\tgroup\n";
  for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
    const char* group = j < JointLayout::kBodyEnd         ? "body"
                        : j < JointLayout::kRightHandEnd ? "right_hand"
                                                         : "left_hand";
    os << j << '\t' << JointLayout::names()[j] << '\t' << group << '\n';
  }
  os << "# bones (" << s.bones.size() << "), root = " << s.root << " ("
     << JointLayout::names()[s.root] << ")\n";
  os << "line\tparent\tchild\n";
  for (const Bone& b : s.bones)
    os << b.line << '\t' << JointLayout::names()[b.a] << '\t' << JointLayout::names()[b.b]
       << '\n';
  return os.str();
}

}  // namespace signforge
