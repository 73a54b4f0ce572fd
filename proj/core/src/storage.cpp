#include "signforge/storage.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "signforge/error.hpp"
#include "signforge/format.hpp"

namespace signforge {

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

ArchiveEntry to_entry(const Pose3DClip& clip) {
  return {clip.id, clip.frames.size(), kPoseWidth, flatten(clip)};
}

ArchiveEntry to_entry(const Clip2D& clip) {
  return {clip.id, clip.frames.size(), kPoseWidth, flatten(clip)};
}

Clip2D clip_from_entry(const ArchiveEntry& e) {
  if (e.width != kPoseWidth)
    fail(ErrorCode::WidthMismatch, "entry '" + e.key + "' has width " + std::to_string(e.width));
  Clip2D clip;
  clip.id = e.key;
  clip.frames.resize(e.frame_count);
  for (std::size_t t = 0; t < e.frame_count; ++t)
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
      const float* v = &e.values[t * kPoseWidth + 3 * j];
      clip.frames[t].x[j] = v[0];
      clip.frames[t].y[j] = v[1];
      clip.frames[t].w[j] = v[2];
    }
  return clip;
}

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }

  template <class T>
  T get() {
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n) {
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_archive(const std::vector<ArchiveEntry>& entries) {
  std::unordered_set<std::string_view> seen;
  std::size_t payload = 0;
  for (const auto& e : entries) {
    if (!seen.insert(e.key).second) fail(ErrorCode::DuplicateKey, "duplicate key '" + e.key + "'");
    if (e.values.size() != e.frame_count * e.width)
      fail(ErrorCode::WidthMismatch, "entry '" + e.key + "' holds " +
                                         std::to_string(e.values.size()) + " values, expected " +
                                         std::to_string(e.frame_count) + " x " +
                                         std::to_string(e.width));
    payload += e.values.size() * sizeof(float);
  }
  std::string out;
  out.reserve(16 + payload + entries.size() * 32);
  out.append(kArchiveMagic);
  put<std::uint32_t>(out, kArchiveVersion);
  put<std::uint64_t>(out, entries.size());
  for (const auto& e : entries) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.key.size()));
    out.append(e.key);
    put<std::uint64_t>(out, e.frame_count);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.width));
  }
  for (const auto& e : entries)
    out.append(reinterpret_cast<const char*>(e.values.data()), e.values.size() * sizeof(float));
  return out;
}

std::vector<ArchiveEntry> read_archive(std::string_view bytes,
                                       std::optional<std::size_t> expected_width) {
  Reader in(bytes);
  if (!in.has(kArchiveMagic.size()) || in.take(kArchiveMagic.size()) != kArchiveMagic)
    fail(ErrorCode::BadMagic, "not a clip archive (bad magic)");
  if (!in.has(12)) fail(ErrorCode::TruncatedPayload, "archive header is truncated");
  const auto version = in.get<std::uint32_t>();
  if (version != kArchiveVersion)
    fail(ErrorCode::BadMagic, "unsupported archive version " + std::to_string(version));
  const auto count = in.get<std::uint64_t>();

  std::vector<ArchiveEntry> entries;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!in.has(4)) fail(ErrorCode::TruncatedPayload, "manifest truncated at entry " + std::to_string(i));
    const auto key_len = in.get<std::uint32_t>();
    if (!in.has(key_len + 12ULL))
      fail(ErrorCode::TruncatedPayload, "manifest truncated at entry " + std::to_string(i));
    ArchiveEntry e;
    e.key = std::string(in.take(key_len));
    e.frame_count = in.get<std::uint64_t>();
    e.width = in.get<std::uint32_t>();
    if (expected_width && e.width != *expected_width)
      fail(ErrorCode::WidthMismatch, "entry '" + e.key + "' has width " + std::to_string(e.width) +
                                         ", expected " + std::to_string(*expected_width));
    entries.push_back(std::move(e));
  }
  for (auto& e : entries) {
    const std::size_t n = e.frame_count * e.width;
    if (e.width != 0 && n / e.width != e.frame_count)
      fail(ErrorCode::TruncatedPayload, "entry '" + e.key + "' declares an impossible size");
    if (!in.has(n * sizeof(float)))
      fail(ErrorCode::TruncatedPayload, "payload for '" + e.key + "' is truncated");
    e.values.resize(n);
    const auto raw = in.take(n * sizeof(float));
    std::memcpy(e.values.data(), raw.data(), raw.size());
  }
  return entries;
}

float progress_counter(std::size_t t, std::size_t frame_count) {
  return static_cast<float>(static_cast<double>(t + 1) / static_cast<double>(frame_count));
}

SkelsFiles pack_skels(const std::vector<PoseClip>& clips) {
  SkelsFiles out;
  for (const auto& clip : clips) {
    if (clip.frames.size() % kPoseWidth != 0)
      fail(ErrorCode::WidthMismatch, "clip '" + clip.id + "' has " +
                                         std::to_string(clip.frames.size()) +
                                         " values, not a multiple of 150");
    const std::size_t T = clip.frame_count();
    if (T == 0) fail(ErrorCode::EmptyClip, "clip '" + clip.id + "' has no frames");
    out.skels.reserve(out.skels.size() + T * kSkelsFrameWidth * 10);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < kPoseWidth; ++i) {
        const float v = clip.frames[t * kPoseWidth + i];
        if (!std::isfinite(v))
          fail(ErrorCode::NonFiniteValue, "clip '" + clip.id + "' frame " + std::to_string(t) +
                                              " value " + std::to_string(i) + " is not finite");
        if (t || i) out.skels += ' ';
        append_shortest(out.skels, v);
      }
      out.skels += ' ';
      append_shortest(out.skels, progress_counter(t, T));
    }
    out.skels += '\n';
    out.sidecar += clip.id;
    out.sidecar += '\n';
  }
  return out;
}

namespace {

// Parses one skels line into 150-wide frames; returns a problem description
// through `problem` (and an error code) instead of throwing.
struct LineParse {
  std::vector<float> frames;
  std::size_t frame_count = 0;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string problem;
};

LineParse parse_line(std::string_view line) {
  LineParse r;
  const auto tokens = split_spaces(line);
  if (tokens.empty() || tokens.size() % kSkelsFrameWidth != 0) {
    r.code = ErrorCode::BadArity;
    r.problem = std::to_string(tokens.size()) + " tokens, not a positive multiple of 151";
    return r;
  }
  const std::size_t T = tokens.size() / kSkelsFrameWidth;
  r.frame_count = T;
  r.frames.reserve(T * kPoseWidth);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < kSkelsFrameWidth; ++i) {
      const auto tok = tokens[t * kSkelsFrameWidth + i];
      float v;
      try {
        v = parse_float(tok);
      } catch (const Error& e) {
        r.code = ErrorCode::UnparsableToken;
        r.problem = e.what();
        return r;
      }
      if (i < kPoseWidth) {
        r.frames.push_back(v);
        continue;
      }
      const double expected = static_cast<double>(t + 1) / static_cast<double>(T);
      if (!(std::abs(static_cast<double>(v) - expected) <= kCounterTolerance)) {
        r.code = ErrorCode::CounterMismatch;
        r.problem = "frame " + std::to_string(t) + " counter " + std::string(tok) +
                    ", expected " + std::to_string(expected);
        return r;
      }
    }
  }
  return r;
}

}  // namespace

std::vector<PoseClip> unpack_skels(std::string_view skels, std::optional<std::string_view> sidecar) {
  auto lines = split_lines(skels);
  std::vector<std::string_view> ids;
  if (sidecar) {
    ids = split_lines(*sidecar);
    if (ids.size() != lines.size())
      fail(ErrorCode::InvalidArgument, "sidecar lists " + std::to_string(ids.size()) +
                                           " ids for " + std::to_string(lines.size()) + " lines");
  }
  std::vector<PoseClip> clips;
  clips.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto parsed = parse_line(lines[i]);
    if (!parsed.problem.empty())
      fail(parsed.code, "skels line " + std::to_string(i + 1) + ": " + parsed.problem);
    clips.push_back({sidecar ? std::string(ids[i]) : "clip_" + std::to_string(i),
                     std::move(parsed.frames)});
  }
  return clips;
}

std::vector<SkelsLineInfo> inspect_skels(std::string_view skels) {
  std::vector<SkelsLineInfo> out;
  const auto lines = split_lines(skels);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto parsed = parse_line(lines[i]);
    out.push_back({i + 1, parsed.frame_count, parsed.problem.empty(), parsed.problem});
  }
  return out;
}

SizeReport size_report(std::size_t raw_bytes, std::size_t packed_bytes) {
  if (raw_bytes == 0) fail(ErrorCode::InvalidArgument, "raw size must be positive");
  return {raw_bytes, packed_bytes,
          1.0 - static_cast<double>(packed_bytes) / static_cast<double>(raw_bytes)};
}

}  // namespace signforge
