#include "signforge/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>

#include "signforge/error.hpp"

namespace signforge {

namespace {

using nlohmann::json;

constexpr std::size_t kBodyUpper = JointLayout::kBodyEnd;
constexpr std::size_t kOpenPoseBody = 25;

std::vector<double> read_keypoints(const json& person, const char* key, std::size_t min_joints,
                                   std::size_t exact_joints) {
  auto it = person.find(key);
  if (it == person.end() || !it->is_array())
    fail(ErrorCode::SchemaMismatch, std::string("missing keypoint array '") + key + "'");
  const json& arr = *it;
  if (arr.size() % 3 != 0)
    fail(ErrorCode::SchemaMismatch,
         std::string("'") + key + "' length " + std::to_string(arr.size()) +
             " is not a multiple of 3");
  const std::size_t joints = arr.size() / 3;
  if (joints < min_joints || (exact_joints != 0 && joints != exact_joints))
    fail(ErrorCode::SchemaMismatch, std::string("'") + key + "' has " + std::to_string(joints) +
                                        " joints");
  std::vector<double> values;
  values.reserve(arr.size());
  for (const json& v : arr) {
    if (v.is_number()) {
      values.push_back(v.get<double>());
    } else if (v.is_null()) {
      // Non-finite numbers cannot be spelled in JSON; serializers write null.
      values.push_back(std::nan(""));
    } else {
      fail(ErrorCode::SchemaMismatch, std::string("non-numeric entry in '") + key + "'");
    }
  }
  return values;
}

void copy_joints(const std::vector<double>& src, std::size_t count, std::size_t dst_begin,
                 Frame2D& f) {
  for (std::size_t j = 0; j < count; ++j) {
    f.x[dst_begin + j] = src[3 * j];
    f.y[dst_begin + j] = src[3 * j + 1];
    f.w[dst_begin + j] = src[3 * j + 2];
  }
}

// OpenPose prints keypoints through a default-precision stream: 6 significant digits.
double openpose_digits(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

Frame2D parse_frame(std::string_view document) {
  json doc = json::parse(document.begin(), document.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    fail(ErrorCode::MalformedDocument, "document is not a JSON object");
  auto people = doc.find("people");
  if (people == doc.end() || !people->is_array())
    fail(ErrorCode::SchemaMismatch, "missing 'people' array");
  if (people->empty()) fail(ErrorCode::NoPerson, "'people' is empty");
  const json& person = people->front();
  if (!person.is_object()) fail(ErrorCode::SchemaMismatch, "person 0 is not an object");

  const auto body = read_keypoints(person, "pose_keypoints_2d", kBodyUpper, 0);
  const auto right = read_keypoints(person, "hand_right_keypoints_2d", 0, JointLayout::kHandJoints);
  const auto left = read_keypoints(person, "hand_left_keypoints_2d", 0, JointLayout::kHandJoints);

  Frame2D f;
  copy_joints(body, kBodyUpper, JointLayout::kBodyBegin, f);
  copy_joints(right, JointLayout::kHandJoints, JointLayout::kRightHandBegin, f);
  copy_joints(left, JointLayout::kHandJoints, JointLayout::kLeftHandBegin, f);
  return f;
}

std::string to_openpose_json(const Frame2D& frame) {
  auto pack = [&](std::size_t begin, std::size_t count, std::size_t padded) {
    json arr = json::array();
    for (std::size_t j = 0; j < padded; ++j) {
      if (j < count) {
        arr.push_back(openpose_digits(frame.x[begin + j]));
        arr.push_back(openpose_digits(frame.y[begin + j]));
        arr.push_back(openpose_digits(frame.w[begin + j]));
      } else {
        arr.push_back(0);
        arr.push_back(0);
        arr.push_back(0);
      }
    }
    return arr;
  };
  json person = {
      {"person_id", {-1}},
      {"pose_keypoints_2d", pack(JointLayout::kBodyBegin, kBodyUpper, kOpenPoseBody)},
      {"face_keypoints_2d", json::array()},
      {"hand_left_keypoints_2d",
       pack(JointLayout::kLeftHandBegin, JointLayout::kHandJoints, JointLayout::kHandJoints)},
      {"hand_right_keypoints_2d",
       pack(JointLayout::kRightHandBegin, JointLayout::kHandJoints, JointLayout::kHandJoints)},
      {"pose_keypoints_3d", json::array()},
      {"face_keypoints_3d", json::array()},
      {"hand_left_keypoints_3d", json::array()},
      {"hand_right_keypoints_3d", json::array()},
  };
  json doc = {{"version", 1.3}, {"people", json::array({person})}};
  return doc.dump();
}

Clip2D assemble_clip(const std::vector<std::string>& frame_documents, std::string id,
                     std::string transcript, std::string language) {
  if (frame_documents.empty()) fail(ErrorCode::EmptyClip, "clip '" + id + "' has no frames");
  Clip2D clip;
  clip.id = std::move(id);
  clip.transcript = std::move(transcript);
  clip.language = std::move(language);
  clip.frames.reserve(frame_documents.size());
  for (std::size_t t = 0; t < frame_documents.size(); ++t) {
    try {
      clip.frames.push_back(parse_frame(frame_documents[t]));
    } catch (const Error& e) {
      throw Error(e.code(), "clip '" + clip.id + "' frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return clip;
}

CleanMode parse_clean_mode(std::string_view name) {
  if (name == "replace_median") return CleanMode::ReplaceMedian;
  if (name == "replace_mean") return CleanMode::ReplaceMean;
  if (name == "drop_frame") return CleanMode::DropFrame;
  fail(ErrorCode::InvalidArgument, "unknown clean policy '" + std::string(name) + "'");
}

namespace {

struct Validity {
  bool x, y, w;
  bool joint() const { return x && y && w; }
};

Validity classify(const Frame2D& f, std::size_t j, const CleanPolicy& p) {
  const bool w_ok = std::isfinite(f.w[j]) && f.w[j] != 0.0;
  bool x_ok = w_ok && std::isfinite(f.x[j]);
  bool y_ok = w_ok && std::isfinite(f.y[j]);
  bool w_valid = w_ok;
  if (p.zero_coordinates_invalid && f.x[j] == 0.0 && f.y[j] == 0.0) x_ok = y_ok = w_valid = false;
  return {x_ok, y_ok, w_valid};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::pair<Clip2D, CleanReport> clean_clip(const Clip2D& clip, const CleanPolicy& policy) {
  if (!(policy.invalid_frame_threshold >= 0.0 && policy.invalid_frame_threshold <= 1.0))
    fail(ErrorCode::InvalidArgument, "invalid_frame_threshold must lie in [0,1]");
  for (const auto& v : validate_clip(clip))
    if (v.kind == ViolationKind::Structural) fail(ErrorCode::SchemaMismatch, v.message);

  constexpr std::size_t n = JointLayout::kJointCount;
  CleanReport report;
  report.frames_in = clip.frames.size();

  Clip2D out = clip;
  out.frames.clear();
  if (policy.mode == CleanMode::DropFrame) {
    for (const Frame2D& f : clip.frames) {
      std::size_t bad = 0;
      for (std::size_t j = 0; j < n; ++j) bad += classify(f, j, policy).joint() ? 0 : 1;
      if (static_cast<double>(bad) / n > policy.invalid_frame_threshold)
        ++report.frames_dropped;
      else
        out.frames.push_back(f);
    }
    if (out.frames.empty())
      fail(ErrorCode::AllFramesInvalid, "clip '" + clip.id + "': every frame was dropped");
  } else {
    out.frames = clip.frames;
  }

  const bool use_mean = policy.mode == CleanMode::ReplaceMean;
  std::vector<Validity> valid(out.frames.size() * n);
  for (std::size_t t = 0; t < out.frames.size(); ++t)
    for (std::size_t j = 0; j < n; ++j) valid[t * n + j] = classify(out.frames[t], j, policy);

  // Per-channel fallback for joints never observed in the clip: the robust
  // centre of every valid value of that channel.
  std::array<std::vector<double>, 3> pooled;
  for (std::size_t t = 0; t < out.frames.size(); ++t)
    for (std::size_t j = 0; j < n; ++j) {
      const Validity v = valid[t * n + j];
      const Frame2D& f = out.frames[t];
      if (v.x) pooled[0].push_back(f.x[j]);
      if (v.y) pooled[1].push_back(f.y[j]);
      if (v.w) pooled[2].push_back(f.w[j]);
    }
  if (pooled[0].empty() || pooled[1].empty() || pooled[2].empty())
    fail(ErrorCode::AllFramesInvalid, "clip '" + clip.id + "' has no valid keypoints");
  std::array<double, 3> fallback{};
  for (int c = 0; c < 3; ++c) fallback[c] = use_mean ? mean(pooled[c]) : median(pooled[c]);

  for (std::size_t j = 0; j < n; ++j) {
    std::array<std::vector<double>, 3> seen;
    bool any_invalid = false;
    for (std::size_t t = 0; t < out.frames.size(); ++t) {
      const Validity v = valid[t * n + j];
      const Frame2D& f = out.frames[t];
      if (v.x) seen[0].push_back(f.x[j]); else any_invalid = true;
      if (v.y) seen[1].push_back(f.y[j]); else any_invalid = true;
      if (v.w) seen[2].push_back(f.w[j]); else any_invalid = true;
    }
    if (!any_invalid) continue;
    std::array<double, 3> fill{};
    for (int c = 0; c < 3; ++c)
      fill[c] = seen[c].empty() ? fallback[c] : (use_mean ? mean(seen[c]) : median(seen[c]));
    for (std::size_t t = 0; t < out.frames.size(); ++t) {
      const Validity v = valid[t * n + j];
      Frame2D& f = out.frames[t];
      if (!v.x) { f.x[j] = fill[0]; ++report.values_replaced; }
      if (!v.y) { f.y[j] = fill[1]; ++report.values_replaced; }
      if (!v.w) { f.w[j] = fill[2]; ++report.values_replaced; }
    }
  }
  report.replacement_fraction =
      static_cast<double>(report.values_replaced) / (static_cast<double>(kPoseWidth) * report.frames_in);
  return {std::move(out), report};
}

}  // namespace signforge
