#include "signforge/lift3d.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/parallel.hpp"

namespace signforge {

void validate(const LiftParams& p) {
  if (!(p.percentile > 0.0 && p.percentile <= 100.0))
    fail(ErrorCode::InvalidArgument, "percentile must lie in (0, 100]");
  if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma))
    fail(ErrorCode::InvalidArgument, "noise_sigma must be finite and >= 0");
}

Table bone_lengths(const Clip2D& clip, const BoneStructure& structure) {
  Table L(clip.frames.size(), structure.bones.size());
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const Frame2D& f = clip.frames[t];
    for (std::size_t k = 0; k < structure.bones.size(); ++k) {
      const Bone& bone = structure.bones[k];
      L(t, k) = std::hypot(f.x[bone.a] - f.x[bone.b], f.y[bone.a] - f.y[bone.b]);
    }
  }
  return L;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "percentile of an empty list");
  if (!(percentile > 0.0 && percentile <= 100.0))
    fail(ErrorCode::InvalidArgument, "percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

CanonicalLengths canonical_lengths(const Table& lengths, double percentile) {
  if (lengths.rows() == 0) fail(ErrorCode::InvalidArgument, "canonical_lengths needs T >= 1");
  CanonicalLengths out;
  out.lengths.resize(lengths.cols());
  out.lines.resize(lengths.cols());
  std::vector<double> column(lengths.rows());
  for (std::size_t k = 0; k < lengths.cols(); ++k) {
    for (std::size_t t = 0; t < lengths.rows(); ++t) column[t] = lengths(t, k);
    const double L = std::max(nearest_rank_percentile(column, percentile), kMinCanonicalLength);
    out.lengths[k] = L;
    out.lines[k] = std::log(L);
  }
  return out;
}

std::array<double, 3> bone_direction(double dx, double dy, double canonical_length) {
  const double dz = std::sqrt(std::max(canonical_length * canonical_length - dx * dx - dy * dy, 0.0));
  return finalize_direction(dx, dy, dz);
}

std::array<double, 3> finalize_direction(double ax, double ay, double az) {
  if (!std::isfinite(ax) || !std::isfinite(ay) || !std::isfinite(az)) return {0.0, 0.0, 0.0};
  if (az < 0.0) az = -az;
  az += kDepthOffset;
  const double norm = std::sqrt(ax * ax + ay * ay + az * az);
  return {ax / norm, ay / norm, az / norm};
}

JointAngles joint_angles(const Clip2D& clip, const BoneStructure& structure,
                         std::span<const double> canonical) {
  const std::size_t T = clip.frames.size(), K = structure.bones.size();
  if (canonical.size() != K)
    fail(ErrorCode::InvalidArgument, "canonical length count does not match bone count");
  JointAngles A{Table(T, K), Table(T, K), Table(T, K)};
  for (std::size_t t = 0; t < T; ++t) {
    const Frame2D& f = clip.frames[t];
    for (std::size_t k = 0; k < K; ++k) {
      const Bone& bone = structure.bones[k];
      const auto d = bone_direction(f.x[bone.b] - f.x[bone.a], f.y[bone.b] - f.y[bone.a],
                                    canonical[bone.line]);
      A.x(t, k) = d[0];
      A.y(t, k) = d[1];
      A.z(t, k) = d[2];
    }
  }
  return A;
}

Pose3DClip forward_kinematics(const BoneStructure& structure, std::span<const double> canonical,
                              const JointAngles& angles, std::span<const double> roots_x,
                              std::span<const double> roots_y, std::span<const double> roots_z,
                              const LiftParams& params, std::string id) {
  validate(params);
  const std::size_t T = angles.x.rows();
  if (roots_x.size() != T || roots_y.size() != T || roots_z.size() != T)
    fail(ErrorCode::InvalidArgument, "root arrays must have one entry per frame");
  std::mt19937_64 rng(params.rng_seed);
  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0 ? params.noise_sigma : 1.0);
  auto eps = [&] { return params.noise_sigma > 0 ? noise(rng) : 0.0; };

  Pose3DClip pose;
  pose.id = std::move(id);
  pose.frames.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    Frame3D& f = pose.frames[t];
    f.x[structure.root] = roots_x[t] + eps();
    f.y[structure.root] = roots_y[t] + eps();
    f.z[structure.root] = roots_z[t] + eps();
    for (std::size_t k = 0; k < structure.bones.size(); ++k) {
      const Bone& bone = structure.bones[k];
      const double L = canonical[bone.line];
      f.x[bone.b] = f.x[bone.a] + L * angles.x(t, k);
      f.y[bone.b] = f.y[bone.a] + L * angles.y(t, k);
      f.z[bone.b] = f.z[bone.a] + L * angles.z(t, k);
    }
  }
  return pose;
}

LiftResult lift_clip(const Clip2D& clip, const BoneStructure& structure, const LiftParams& params) {
  validate(params);
  if (clip.frames.empty()) fail(ErrorCode::EmptyClip, "clip '" + clip.id + "' has no frames");
  const std::size_t T = clip.frames.size();

  LiftResult r;
  auto canon = canonical_lengths(bone_lengths(clip, structure), params.percentile);
  r.lines = std::move(canon.lines);
  r.canonical_lengths = std::move(canon.lengths);
  r.angles = joint_angles(clip, structure, r.canonical_lengths);

  std::vector<double> rx(T), ry(T), rz(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    rx[t] = clip.frames[t].x[structure.root];
    ry[t] = clip.frames[t].y[structure.root];
  }
  LiftParams clip_params = params;
  clip_params.rng_seed = derive_seed(params.rng_seed, clip.id);
  r.pose = forward_kinematics(structure, r.canonical_lengths, r.angles, rx, ry, rz, clip_params,
                              clip.id);
  r.roots_x.resize(T);
  r.roots_y.resize(T);
  r.roots_z.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    r.roots_x[t] = r.pose.frames[t].x[structure.root];
    r.roots_y[t] = r.pose.frames[t].y[structure.root];
    r.roots_z[t] = r.pose.frames[t].z[structure.root];
  }
  return r;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot write " + p.string());
  os << body;
}

}  // namespace

void write_lift_outputs(const std::filesystem::path& dir, const LiftResult& r) {
  std::filesystem::create_directories(dir);
  const std::size_t T = r.pose.frames.size();
  std::string s;

  for (std::size_t k = 0; k < r.lines.size(); ++k) {
    if (k) s += ' ';
    append_shortest(s, r.lines[k]);
  }
  s += '\n';
  write_text(dir / "1_lines.txt", s);

  s.clear();
  for (std::size_t t = 0; t < T; ++t) {
    append_shortest(s, r.roots_x[t]);
    s += ' ';
    append_shortest(s, r.roots_y[t]);
    s += ' ';
    append_shortest(s, r.roots_z[t]);
    s += '\n';
  }
  write_text(dir / "2_roots.txt", s);

  s.clear();
  const std::size_t K = r.angles.x.cols();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      if (k) s += ' ';
      append_shortest(s, r.angles.x(t, k));
      s += ' ';
      append_shortest(s, r.angles.y(t, k));
      s += ' ';
      append_shortest(s, r.angles.z(t, k));
    }
    s += '\n';
  }
  write_text(dir / "3_angles.txt", s);

  // Root-relative skeleton, then the absolute one.
  for (int pass = 0; pass < 2; ++pass) {
    s.clear();
    for (std::size_t t = 0; t < T; ++t) {
      const Frame3D& f = r.pose.frames[t];
      const double ox = pass == 0 ? r.roots_x[t] : 0.0;
      const double oy = pass == 0 ? r.roots_y[t] : 0.0;
      const double oz = pass == 0 ? r.roots_z[t] : 0.0;
      for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
        if (j) s += ' ';
        append_shortest(s, static_cast<float>(f.x[j] - ox));
        s += ' ';
        append_shortest(s, static_cast<float>(f.y[j] - oy));
        s += ' ';
        append_shortest(s, static_cast<float>(f.z[j] - oz));
      }
      s += '\n';
    }
    write_text(dir / (pass == 0 ? "4_local.txt" : "5_final.txt"), s);
  }
}

std::vector<float> read_final_pose(const std::filesystem::path& dir) {
  const auto path = dir / "5_final.txt";
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot read " + path.string());
  std::vector<float> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t count = 0;
    for (std::string_view tok : split_spaces(line)) {
      out.push_back(parse_float(tok));
      ++count;
    }
    if (count != kPoseWidth)
      fail(ErrorCode::WidthMismatch, path.string() + ":" + std::to_string(lineno) + ": " +
                                         std::to_string(count) + " values, expected 150");
  }
  return out;
}

}  // namespace signforge
