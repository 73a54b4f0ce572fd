#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "signforge/skeleton.hpp"

namespace signforge {

// Dense row-major real matrix, rows = frames, cols = bones.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct LiftParams {
  double percentile = 95.0;   // (0, 100]
  double noise_sigma = 0.0;   // stddev of the Gaussian added to root coordinates
  std::uint64_t rng_seed = 0;
};

void validate(const LiftParams& p);

struct JointAngles {
  Table x, y, z;  // T x bones, normalized direction per bone
};

struct LiftResult {
  std::vector<double> lines;  // ln(canonical length) per bone
  std::vector<double> canonical_lengths;
  std::vector<double> roots_x, roots_y, roots_z;
  JointAngles angles;
  Pose3DClip pose;
};

inline constexpr double kMinCanonicalLength = 1e-6;
inline constexpr double kDepthOffset = 0.001;

// L[t][k] = |joint b - joint a| in the image plane.
Table bone_lengths(const Clip2D& clip, const BoneStructure& structure);

// Nearest-rank percentile of `values` (copied and sorted).
double nearest_rank_percentile(std::vector<double> values, double percentile);

struct CanonicalLengths {
  std::vector<double> lengths;  // clamped below at kMinCanonicalLength
  std::vector<double> lines;    // natural log of `lengths`
};

CanonicalLengths canonical_lengths(const Table& lengths, double percentile);

// One bone direction from its 2D offset and canonical length:
// depth from foreshortening, non-finite -> (0,0,0), |z| then +0.001, unit norm.
std::array<double, 3> bone_direction(double dx, double dy, double canonical_length);
// The post-processing applied to a raw (dx, dy, dz) triple.
std::array<double, 3> finalize_direction(double ax, double ay, double az);

JointAngles joint_angles(const Clip2D& clip, const BoneStructure& structure,
                         std::span<const double> canonical);

// Roots are the pre-noise root positions per frame; noise is drawn from
// params.rng_seed in (frame, axis) order.
Pose3DClip forward_kinematics(const BoneStructure& structure, std::span<const double> canonical,
                              const JointAngles& angles, std::span<const double> roots_x,
                              std::span<const double> roots_y, std::span<const double> roots_z,
                              const LiftParams& params, std::string id = {});

// Full 2D -> 3D conversion. The noise stream is seeded from
// (params.rng_seed, clip.id), so results do not depend on processing order.
LiftResult lift_clip(const Clip2D& clip, const BoneStructure& structure, const LiftParams& params);

// Writes the five per-clip text files into `dir`; 5_final.txt holds one
// 150-value line per frame.
void write_lift_outputs(const std::filesystem::path& dir, const LiftResult& result);

// Reads 5_final.txt back as a frame-major T x 150 float array.
std::vector<float> read_final_pose(const std::filesystem::path& dir);

}  // namespace signforge
