#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signforge/skeleton.hpp"

namespace signforge {

// ---------------------------------------------------------------------------
// Clip archive
//
// Layout (all integers little-endian):
//   magic "SFCA" | u32 version (1) | u64 entry count
//   per entry:  u32 key length | key bytes | u64 frame count | u32 width
//   payload:    per entry, frame_count * width IEEE-754 float32 values
// ---------------------------------------------------------------------------

struct ArchiveEntry {
  std::string key;
  std::size_t frame_count = 0;
  std::size_t width = kPoseWidth;
  std::vector<float> values;  // frame_count * width, frame-major

  friend bool operator==(const ArchiveEntry&, const ArchiveEntry&) = default;
};

inline constexpr std::string_view kArchiveMagic = "SFCA";
inline constexpr std::uint32_t kArchiveVersion = 1;

ArchiveEntry to_entry(const Pose3DClip& clip);
ArchiveEntry to_entry(const Clip2D& clip);
// Inverse of to_entry(Clip2D): x, y, confidence per joint.
Clip2D clip_from_entry(const ArchiveEntry& e);

// Throws DuplicateKey, or WidthMismatch when values.size() != T * width.
std::string write_archive(const std::vector<ArchiveEntry>& entries);

// Throws BadMagic, TruncatedPayload, or WidthMismatch when `expected_width`
// is set and an entry disagrees.
std::vector<ArchiveEntry> read_archive(std::string_view bytes,
                                       std::optional<std::size_t> expected_width = std::nullopt);

// ---------------------------------------------------------------------------
// Standard pose storage (.skels): one line per clip; each frame contributes
// 150 pose values followed by the progress counter (t+1)/T. Tokens are
// separated by one space and printed as the shortest text that round-trips
// the float32 value. Clip ids live in a parallel sidecar, one per line.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSkelsFrameWidth = kPoseWidth + 1;
inline constexpr double kCounterTolerance = 1e-5;

struct PoseClip {
  std::string id;
  std::vector<float> frames;  // T x 150, frame-major

  std::size_t frame_count() const noexcept { return frames.size() / kPoseWidth; }
  friend bool operator==(const PoseClip&, const PoseClip&) = default;
};

struct SkelsFiles {
  std::string skels;
  std::string sidecar;
};

float progress_counter(std::size_t t, std::size_t frame_count);

// Throws WidthMismatch, NonFiniteValue, or EmptyClip for T = 0.
SkelsFiles pack_skels(const std::vector<PoseClip>& clips);

// Throws BadArity, CounterMismatch, UnparsableToken. Without a sidecar the
// ids are "clip_<line>".
std::vector<PoseClip> unpack_skels(std::string_view skels,
                                   std::optional<std::string_view> sidecar = std::nullopt);

struct SkelsLineInfo {
  std::size_t line = 0;
  std::size_t frame_count = 0;
  bool counters_ok = false;
  std::string problem;
};

// Tolerant scan used by `inspect`: never throws on content problems.
std::vector<SkelsLineInfo> inspect_skels(std::string_view skels);

struct SizeReport {
  std::size_t raw = 0;
  std::size_t packed = 0;
  double reduction_fraction = 0.0;
};

SizeReport size_report(std::size_t raw_bytes, std::size_t packed_bytes);

}  // namespace signforge
