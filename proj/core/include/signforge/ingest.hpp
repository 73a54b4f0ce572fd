#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "signforge/skeleton.hpp"

namespace signforge {

// Reads one OpenPose JSON document and keeps person 0's upper body (first 8
// entries of pose_keypoints_2d) plus both 21-point hands.
// Throws MalformedDocument, NoPerson or SchemaMismatch.
Frame2D parse_frame(std::string_view document);

// Emits an OpenPose-shaped document for `frame`, values at OpenPose's 6
// significant digits. The body array is padded to
// the 25-joint layout with undetected (all-zero) leg joints.
std::string to_openpose_json(const Frame2D& frame);

// Documents must be in temporal order. Parse failures are rethrown with the
// 0-based frame index in the message. Throws EmptyClip for no documents.
Clip2D assemble_clip(const std::vector<std::string>& frame_documents, std::string id,
                     std::string transcript, std::string language);

enum class CleanMode { ReplaceMedian, ReplaceMean, DropFrame };

struct CleanPolicy {
  CleanMode mode = CleanMode::ReplaceMedian;
  double invalid_frame_threshold = 0.5;
  // Also treat joints reported at exactly (0, 0) as undetected, regardless
  // of confidence.
  bool zero_coordinates_invalid = false;
};

CleanMode parse_clean_mode(std::string_view name);

struct CleanReport {
  std::size_t frames_in = 0;
  std::size_t frames_dropped = 0;
  std::size_t values_replaced = 0;
  double replacement_fraction = 0.0;
};

// Replaces invalid values (non-finite, or belonging to a zero-confidence
// joint) with the per-joint median/mean of the clip's valid values. In
// DropFrame mode, frames whose invalid-joint fraction exceeds the threshold
// are removed first and the remainder is median-filled.
// Throws AllFramesInvalid when nothing usable is left.
std::pair<Clip2D, CleanReport> clean_clip(const Clip2D& clip, const CleanPolicy& policy);

}  // namespace signforge
