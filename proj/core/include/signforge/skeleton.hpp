#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace signforge {

// Upper-body + hands layout: 8 body joints followed by two 21-point hands.
struct JointLayout {
  static constexpr std::size_t kJointCount = 50;
  static constexpr std::size_t kBodyBegin = 0, kBodyEnd = 8;
  static constexpr std::size_t kRightHandBegin = 8, kRightHandEnd = 29;
  static constexpr std::size_t kLeftHandBegin = 29, kLeftHandEnd = 50;
  static constexpr std::size_t kHandJoints = 21;

  static constexpr std::size_t kNose = 0, kNeck = 1;
  static constexpr std::size_t kRShoulder = 2, kRElbow = 3, kRWrist = 4;
  static constexpr std::size_t kLShoulder = 5, kLElbow = 6, kLWrist = 7;

  static const std::array<std::string, kJointCount>& names();
};

// Values per frame once flattened: 50 joints x 3 channels.
inline constexpr std::size_t kPoseWidth = JointLayout::kJointCount * 3;

struct Bone {
  std::size_t a = 0;     // parent joint
  std::size_t b = 0;     // child joint
  std::size_t line = 0;  // index into the per-bone lines array
};

struct BoneStructure {
  std::vector<Bone> bones;
  std::size_t root = JointLayout::kNeck;

  std::size_t bone_count() const noexcept { return bones.size(); }
};

// The fixed 49-bone tree rooted at the neck, listed parents-first.
const BoneStructure& standard_structure();

// Empty when `s` is a topologically ordered spanning tree over all joints;
// otherwise one message per problem found.
std::vector<std::string> check_structure(const BoneStructure& s);

struct Frame2D {
  std::vector<double> x, y, w;

  Frame2D()
      : x(JointLayout::kJointCount, 0.0),
        y(JointLayout::kJointCount, 0.0),
        w(JointLayout::kJointCount, 0.0) {}
};

struct Clip2D {
  std::string id;
  std::vector<Frame2D> frames;
  std::string transcript;
  std::optional<std::vector<std::string>> gloss;
  std::string language;

  std::size_t frame_count() const noexcept { return frames.size(); }
};

struct Frame3D {
  std::vector<double> x, y, z;

  Frame3D()
      : x(JointLayout::kJointCount, 0.0),
        y(JointLayout::kJointCount, 0.0),
        z(JointLayout::kJointCount, 0.0) {}
};

struct Pose3DClip {
  std::string id;
  std::vector<Frame3D> frames;
};

// Frame-major flattening, joint-interleaved: x0 y0 c0 x1 y1 c1 ...
std::vector<float> flatten(const Pose3DClip& clip);
std::vector<float> flatten(const Clip2D& clip);

enum class ViolationKind { Structural, NonFinite, ZeroConfidence };

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> frame;
  std::optional<std::size_t> joint;
  std::string message;
};

// Reports problems without touching the clip.
std::vector<Violation> validate_clip(const Clip2D& clip);

// Renders the joint and bone tables as plain text.
std::string describe_structure(const BoneStructure& s);

}  // namespace signforge
