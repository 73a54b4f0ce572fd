// Acceptance runner: one PASS/FAIL line per criterion.
//
//   signforge_acceptance [--cli PATH] [--work DIR] [--curves FILE] [N ...]
//
// With criterion numbers given, only those run. Exit status is 0 when every
// selected criterion passes.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "signforge/corpus.hpp"
#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/ingest.hpp"
#include "signforge/langgloss.hpp"
#include "signforge/lift3d.hpp"
#include "signforge/metrics.hpp"
#include "signforge/parallel.hpp"
#include "signforge/pipeline.hpp"
#include "signforge/signmodel.hpp"
#include "signforge/storage.hpp"
#include "signforge/synth.hpp"
#include "signforge/tensor.hpp"
#include "signforge/training.hpp"

namespace fs = std::filesystem;
using namespace signforge;

namespace {

struct Options {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "signforge_acceptance";
  fs::path curves;
};
Options opts;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Clip2D random_clip(std::mt19937_64& rng, std::size_t T, std::string id) {
  std::uniform_real_distribution<double> pos(0.0, 1.0), conf(0.3, 1.0);
  Clip2D c;
  c.id = std::move(id);
  c.frames.resize(T);
  for (auto& f : c.frames)
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
      f.x[j] = pos(rng);
      f.y[j] = pos(rng);
      f.w[j] = conf(rng);
    }
  return c;
}

// ---------------------------------------------------------------------------
// 1

Outcome lifting_conformance() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  const auto& S = standard_structure();
  LiftParams params;
  params.noise_sigma = 0.05;
  params.rng_seed = 9;
  double worst_norm = 0, worst_len = 0, min_z = 1;
  std::size_t zero_triples = 0, triples = 0;
  for (int c = 0; c < 100; ++c) {
    const auto clip = random_clip(rng, len(rng), "clip" + std::to_string(c));
    const auto r = lift_clip(clip, S, params);
    for (std::size_t t = 0; t < clip.frame_count(); ++t) {
      for (std::size_t k = 0; k < S.bone_count(); ++k) {
        const double x = r.angles.x(t, k), y = r.angles.y(t, k), z = r.angles.z(t, k);
        ++triples;
        if (x == 0 && y == 0 && z == 0) {
          ++zero_triples;
        } else {
          worst_norm = std::max(worst_norm, std::abs(std::sqrt(x * x + y * y + z * z) - 1.0));
        }
        min_z = std::min(min_z, z);
        const Bone& b = S.bones[k];
        const auto& f = r.pose.frames[t];
        const double d = std::hypot(f.x[b.b] - f.x[b.a], f.y[b.b] - f.y[b.a], f.z[b.b] - f.z[b.a]);
        worst_len = std::max(worst_len, std::abs(d - r.canonical_lengths[b.line]));
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_norm <= 1e-6 && min_z >= 0 && worst_len <= 1e-6 && secs < 10;
  return {ok, fmt("%zu triples (%zu zero), max |norm-1| %.2e, min z %.4f, max |bone-L| %.2e, %.2fs",
                  triples, zero_triples, worst_norm, min_z, worst_len, secs)};
}

// ---------------------------------------------------------------------------
// 2

Outcome lifting_literals() {
  std::vector<std::string> failed;
  // +0.001 on a bone lying in the image plane (zero foreshortening depth).
  {
    const auto d = bone_direction(3.0, 4.0, 5.0);
    const double n = std::sqrt(25.0 + 0.001 * 0.001);
    if (std::abs(d[0] - 3.0 / n) > 1e-12 || std::abs(d[2] - 0.001 / n) > 1e-12)
      failed.push_back("z-offset");
  }
  // Negative depth is negated before the offset.
  {
    const auto neg = finalize_direction(1.0, 2.0, -2.0);
    const auto pos = finalize_direction(1.0, 2.0, 2.0);
    if (neg != pos || neg[2] <= 0) failed.push_back("negate-z");
  }
  // Non-finite components collapse to (0,0,0), also through the full lift.
  {
    const auto d = finalize_direction(std::nan(""), 0.5, 0.5);
    bool ok = d == std::array<double, 3>{0.0, 0.0, 0.0};
    std::mt19937_64 rng(2);
    auto clip = random_clip(rng, 4, "nan");
    const auto& S = standard_structure();
    const std::size_t joint = JointLayout::kRWrist;
    clip.frames[2].x[joint] = std::nan("");
    const auto r = lift_clip(clip, S, {});
    for (std::size_t k = 0; k < S.bone_count(); ++k) {
      const bool touches = S.bones[k].a == joint || S.bones[k].b == joint;
      const bool zero = r.angles.x(2, k) == 0 && r.angles.y(2, k) == 0 && r.angles.z(2, k) == 0;
      if (touches != zero) ok = false;
    }
    if (!ok) failed.push_back("non-finite");
  }
  // lines = ln(percentile length).
  {
    Table L(20, 2);
    for (std::size_t t = 0; t < 20; ++t) {
      L(t, 0) = static_cast<double>(t + 1);
      L(t, 1) = 2.0 * static_cast<double>(20 - t);
    }
    const auto c = canonical_lengths(L, 95.0);
    if (std::abs(c.lines[0] - std::log(19.0)) > 1e-12 || std::abs(c.lines[1] - std::log(38.0)) > 1e-12)
      failed.push_back("ln(max L)");
  }
  std::string detail = "z+0.001, negate z<0, non-finite->(0,0,0), lines=ln(percentile)";
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------------------
// 3

Outcome skels_format() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_int_distribution<std::uint32_t> bits;
  std::normal_distribution<float> val(0.0f, 10.0f);
  std::vector<PoseClip> clips;
  for (int c = 0; c < 1000; ++c) {
    PoseClip p{"c" + std::to_string(c), std::vector<float>(len(rng) * kPoseWidth)};
    for (auto& v : p.frames) {
      // Mix ordinary values with arbitrary finite bit patterns.
      if (bits(rng) % 8 == 0) {
        std::uint32_t u;
        do {
          u = bits(rng);
          std::memcpy(&v, &u, sizeof v);
        } while (!std::isfinite(v));
      } else {
        v = val(rng);
      }
    }
    clips.push_back(std::move(p));
  }
  const auto files = pack_skels(clips);
  const auto back = unpack_skels(files.skels, files.sidecar);
  bool identical = back.size() == clips.size();
  for (std::size_t i = 0; identical && i < clips.size(); ++i)
    identical = back[i].id == clips[i].id && back[i].frames.size() == clips[i].frames.size() &&
                std::memcmp(back[i].frames.data(), clips[i].frames.data(),
                            clips[i].frames.size() * sizeof(float)) == 0;

  bool arity = true, counters = true;
  const auto lines = split_lines(files.skels);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto tok = split_spaces(lines[i]);
    const std::size_t T = clips[i].frame_count();
    if (tok.size() != kSkelsFrameWidth * T) arity = false;
    for (std::size_t t = 0; arity && t < T; ++t) {
      const float c = parse_float(tok[t * kSkelsFrameWidth + kPoseWidth]);
      const float expect = static_cast<float>(static_cast<double>(t + 1) / static_cast<double>(T));
      if (c != expect) counters = false;
    }
  }

  // Size: synthetic clips rendered as OpenPose pixel-space documents, then
  // ingested, lifted and packed.
  SynthSpec spec;
  spec.clips = 50;
  spec.seed = 11;
  const auto synth = generate(spec);
  std::vector<PoseClip> pc;
  std::size_t raw = 0;
  for (const auto& c : synth.clips) {
    std::vector<std::string> docs;
    const std::size_t T = c.pose.size() / kPoseWidth;
    for (std::size_t t = 0; t < T; ++t) {
      Frame2D f;
      for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
        const float* v = c.pose.data() + t * kPoseWidth + 3 * j;
        f.x[j] = 640.0 + 300.0 * v[0];
        f.y[j] = 360.0 + 300.0 * v[1];
        f.w[j] = 0.5 + 0.5 * std::abs(std::sin(5.0 * v[2]));
      }
      docs.push_back(to_openpose_json(f));
      raw += docs.back().size();
    }
    const auto lifted = lift_clip(assemble_clip(docs, c.id, c.transcript, c.language), standard_structure(), {});
    pc.push_back({c.id, flatten(lifted.pose)});
  }
  const auto sr = size_report(raw, pack_skels(pc).skels.size());
  const bool ok = identical && arity && counters && pc.size() == 100 && sr.reduction_fraction >= 0.6;
  return {ok, fmt("roundtrip %s on 1000 clips, arity %s, counters %s, %zu-clip reduction %.1f%%",
                  identical ? "bit-identical" : "DIFFERS", arity ? "ok" : "BAD",
                  counters ? "exact" : "BAD", pc.size(), 100.0 * sr.reduction_fraction)};
}

// ---------------------------------------------------------------------------
// 4

using TapeD = ad::Tape<double>;
using TensorD = ad::Tensor<double>;
using Builder = std::function<TensorD(TapeD&, const std::vector<TensorD>&)>;

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Random projection to a scalar so every output element matters.
TensorD reduce(TapeD& tape, const TensorD& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto w = TensorD::constant(out.shape(), random_values(rng, out.size()));
  return tape.mean(tape.multiply(out, w));
}

// Largest relative error between analytic and central-difference gradients.
double grad_check(std::vector<TensorD> inputs, const Builder& f, std::uint64_t seed) {
  TapeD tape;
  const auto loss = reduce(tape, f(tape, inputs), seed);
  tape.backward(loss);
  std::vector<std::vector<double>> analytic;
  for (const auto& in : inputs) {
    auto g = tape.grad(in);
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(in.size(), 0.0);
  }
  auto eval = [&] {
    TapeD t(false);
    return reduce(t, f(t, inputs), seed).item();
  };
  const double h = 1e-6;
  double worst = 0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    auto vals = inputs[p].mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double up = eval();
      vals[i] = keep - h;
      const double down = eval();
      vals[i] = keep;
      const double num = (up - down) / (2 * h);
      const double a = analytic[p][i];
      const double denom = std::max({std::abs(a), std::abs(num), 1e-6});
      worst = std::max(worst, std::abs(a - num) / denom);
    }
  }
  return worst;
}

TensorD param(std::mt19937_64& rng, ad::Shape s, double lo = -1, double hi = 1) {
  const auto n = ad::shape_size(s);
  return TensorD::parameter(std::move(s), random_values(rng, n, lo, hi));
}

// Values bounded away from zero so relu's kink is not straddled.
TensorD param_off_zero(std::mt19937_64& rng, ad::Shape s) {
  auto t = param(rng, std::move(s));
  for (auto& v : t.mutable_values()) v = v < 0 ? v - 0.05 : v + 0.05;
  return t;
}

struct OpCase {
  std::string name;
  std::function<std::pair<std::vector<TensorD>, Builder>(std::mt19937_64&)> make;
};

std::vector<OpCase> op_cases() {
  std::vector<OpCase> ops;
  auto dims = [](std::mt19937_64& r) { return std::uniform_int_distribution<std::size_t>(1, 4)(r); };
  ops.push_back({"matmul", [=](auto& r) {
                   const auto m = dims(r), k = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, k}), param(r, {k, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.matmul(x[0], x[1]); })};
                 }});
  ops.push_back({"matmul_bt", [=](auto& r) {
                   const auto m = dims(r), k = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, k}), param(r, {n, k})},
                                    Builder([](TapeD& t, const auto& x) { return t.matmul(x[0], x[1], true); })};
                 }});
  ops.push_back({"add", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n}), param(r, {m, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.add(x[0], x[1]); })};
                 }});
  ops.push_back({"add_bias", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n}), param(r, {n})},
                                    Builder([](TapeD& t, const auto& x) { return t.add(x[0], x[1]); })};
                 }});
  ops.push_back({"multiply", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n}), param(r, {m, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.multiply(x[0], x[1]); })};
                 }});
  ops.push_back({"scale", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   const double f = std::uniform_real_distribution<double>(-3, 3)(r);
                   return std::pair{std::vector{param(r, {m, n})},
                                    Builder([f](TapeD& t, const auto& x) { return t.scale(x[0], f); })};
                 }});
  ops.push_back({"softmax", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n}, -3, 3)},
                                    Builder([](TapeD& t, const auto& x) { return t.softmax(x[0]); })};
                 }});
  ops.push_back({"softmax_causal", [=](auto& r) {
                   const auto n = dims(r), m = std::uniform_int_distribution<std::size_t>(1, n)(r);
                   return std::pair{std::vector{param(r, {m, n}, -3, 3)},
                                    Builder([](TapeD& t, const auto& x) { return t.softmax(x[0], true); })};
                 }});
  ops.push_back({"layer_norm", [=](auto& r) {
                   const auto m = dims(r), n = dims(r) + 1;
                   return std::pair{std::vector{param(r, {m, n}, -2, 2), param(r, {n}), param(r, {n})},
                                    Builder([](TapeD& t, const auto& x) { return t.layer_norm(x[0], x[1], x[2]); })};
                 }});
  ops.push_back({"relu", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param_off_zero(r, {m, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.relu(x[0]); })};
                 }});
  ops.push_back({"embedding_lookup", [=](auto& r) {
                   const auto V = dims(r) + 1, d = dims(r), n = dims(r);
                   std::vector<std::size_t> ids(n);
                   for (auto& i : ids) i = std::uniform_int_distribution<std::size_t>(0, V - 1)(r);
                   return std::pair{std::vector{param(r, {V, d})},
                                    Builder([ids](TapeD& t, const auto& x) { return t.embedding_lookup(x[0], ids); })};
                 }});
  ops.push_back({"concat_rows", [=](auto& r) {
                   const auto a = dims(r), b = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {a, n}), param(r, {b, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.concat({x[0], x[1]}, 0); })};
                 }});
  ops.push_back({"concat_cols", [=](auto& r) {
                   const auto m = dims(r), a = dims(r), b = dims(r);
                   return std::pair{std::vector{param(r, {m, a}), param(r, {m, b})},
                                    Builder([](TapeD& t, const auto& x) { return t.concat({x[0], x[1]}, 1); })};
                 }});
  ops.push_back({"slice", [=](auto& r) {
                   const auto m = dims(r) + 1, n = dims(r) + 1;
                   const std::size_t axis = r() % 2, ext = axis ? n : m;
                   const auto b = std::uniform_int_distribution<std::size_t>(0, ext - 1)(r);
                   const auto e = std::uniform_int_distribution<std::size_t>(b + 1, ext)(r);
                   return std::pair{std::vector{param(r, {m, n})},
                                    Builder([=](TapeD& t, const auto& x) { return t.slice(x[0], axis, b, e); })};
                 }});
  ops.push_back({"mean", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.mean(x[0]); })};
                 }});
  ops.push_back({"mse", [=](auto& r) {
                   const auto m = dims(r), n = dims(r);
                   return std::pair{std::vector{param(r, {m, n}), param(r, {m, n})},
                                    Builder([](TapeD& t, const auto& x) { return t.mse(x[0], x[1]); })};
                 }});
  ops.push_back({"cross_entropy", [=](auto& r) {
                   const auto m = dims(r) + 1, V = dims(r) + 1;
                   std::vector<std::size_t> tgt(m);
                   for (auto& i : tgt) i = std::uniform_int_distribution<std::size_t>(0, V - 1)(r);
                   tgt[0] = V;  // ignored row
                   return std::pair{std::vector{param(r, {m, V}, -3, 3)},
                                    Builder([tgt, V](TapeD& t, const auto& x) {
                                      return t.cross_entropy(x[0], tgt, V);
                                    })};
                 }});
  return ops;
}

// Three random operators chained on a [m, n] value.
std::pair<std::vector<TensorD>, Builder> random_composite(std::mt19937_64& r) {
  const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(r);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 4)(r);
  std::vector<TensorD> in{param(r, {m, n}), param(r, {n, n}), param(r, {n}), param(r, {n})};
  std::array<int, 3> pick{};
  for (auto& p : pick) p = static_cast<int>(r() % 6);
  Builder f = [pick](TapeD& t, const std::vector<TensorD>& x) {
    TensorD h = x[0];
    for (int p : pick) {
      switch (p) {
        case 0: h = t.matmul(h, x[1]); break;
        case 1: h = t.add(h, x[2]); break;
        case 2: h = t.softmax(h); break;
        case 3: h = t.layer_norm(h, x[2], x[3]); break;
        case 4: h = t.multiply(h, h); break;
        default: h = t.scale(t.add(h, x[3]), 0.7); break;
      }
    }
    return h;
  };
  return {std::move(in), f};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  constexpr int kSeeds = 100;
  double worst = 0;
  std::string worst_op;
  std::size_t checks = 0;
  auto cases = op_cases();
  cases.push_back({"composite", random_composite});
  for (const auto& op : cases) {
    for (int s = 0; s < kSeeds; ++s) {
      std::mt19937_64 rng(derive_seed(4000, op.name) + static_cast<std::uint64_t>(s));
      auto [inputs, f] = op.make(rng);
      const double e = grad_check(std::move(inputs), f, static_cast<std::uint64_t>(s));
      ++checks;
      if (e > worst) {
        worst = e;
        worst_op = op.name;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-3 && secs < 60,
          fmt("%zu operators + composite x %d seeds, max rel err %.2e (%s), %.1fs",
              cases.size() - 1, kSeeds, worst, worst_op.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// 5

// Upper tail of the chi-square distribution via the regularized gamma function.
double chi_square_p(double x, double dof) {
  const double a = dof / 2, z = x / 2;
  // Series for P(a, z), continued fraction for Q(a, z).
  if (z < a + 1) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 1000; ++n) {
      term *= z / (a + n);
      sum += term;
      if (term < sum * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
  }
  double b = z + 1 - a, c = 1e300, d = 1 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-15) break;
  }
  return std::exp(-z + a * std::log(z) - std::lgamma(a)) * h;
}

Outcome plc_law() {
  std::vector<std::string> failed;
  const std::vector<double> r13{1, 3};
  const auto p1 = plc_probabilities(r13, 1.0), p2 = plc_probabilities(r13, 2.0);
  if (std::abs(p1[0] - 0.25) > 1e-9 || std::abs(p1[1] - 0.75) > 1e-9) failed.push_back("eta=1");
  if (std::abs(p2[0] - 0.1) > 1e-9 || std::abs(p2[1] - 0.9) > 1e-9) failed.push_back("eta=2");

  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  std::uniform_real_distribution<double> reward(0.0, 5.0), eta(0.0, 4.0);
  bool uniform = true, sums = true, monotone = true;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> r(size(rng));
    for (auto& x : r) x = trial % 10 == 0 ? std::floor(reward(rng)) : reward(rng);
    const auto u = plc_probabilities(r, 0.0);
    for (double x : u)
      if (x != 1.0 / static_cast<double>(r.size())) uniform = false;
    const auto p = plc_probabilities(r, eta(rng));
    if (std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) > 1e-9) sums = false;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j)
        if (r[i] > r[j] && p[i] < p[j]) monotone = false;
  }
  if (!uniform) failed.push_back("eta=0 uniform");
  if (!sums) failed.push_back("sum");
  if (!monotone) failed.push_back("monotone");

  const std::vector<double> rewards{0.5, 1.0, 2.0, 0.0, 3.5, 1.25, 0.75, 4.0};
  const auto P = plc_probabilities(rewards, 1.5);
  std::mt19937_64 sampler(42);
  constexpr std::size_t kDraws = 100000;
  std::vector<double> counts(P.size(), 0.0);
  for (auto i : plc_sample(P, kDraws, sampler)) counts[i] += 1;
  double chi = 0;
  std::size_t dof = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double e = P[i] * kDraws;
    if (e <= 0) continue;
    chi += (counts[i] - e) * (counts[i] - e) / e;
    ++dof;
  }
  const double p_value = chi_square_p(chi, static_cast<double>(dof - 1));
  if (!(p_value > 0.01)) failed.push_back("chi-square");

  std::string detail = fmt("{1,3}: eta1 %.9f/%.9f eta2 %.9f/%.9f; 1e4 vectors; chi2 %.2f p=%.3f",
                           p1[0], p1[1], p2[0], p2[1], chi, p_value);
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------------------
// 6

Outcome rl_reformulation() {
  // y = 2x - 1 + noise on 16 fixed points, model y = w x + b, 4 batches of 4.
  std::mt19937_64 rng(606);
  std::normal_distribution<float> noise(0.0f, 0.1f);
  std::vector<float> xs(16), ys(16);
  for (std::size_t i = 0; i < 16; ++i) {
    xs[i] = static_cast<float>(i) / 8.0f - 1.0f;
    ys[i] = 2.0f * xs[i] - 1.0f + noise(rng);
  }
  std::uniform_real_distribution<float> wd(-4.0f, 4.0f);
  std::uniform_int_distribution<int> nc(2, 20);
  std::size_t agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = nc(rng);
    std::size_t best_reward = 0, best_loss = 0;
    double max_reward = -INFINITY, min_loss = INFINITY;
    for (int c = 0; c < n; ++c) {
      const float w = wd(rng), b = wd(rng);
      double reward = 0, loss = 0;
      for (std::size_t batch = 0; batch < 4; ++batch) {
        std::vector<float> pred(4), tgt(4);
        for (std::size_t i = 0; i < 4; ++i) {
          pred[i] = w * xs[batch * 4 + i] + b;
          tgt[i] = ys[batch * 4 + i];
        }
        reward += reward_of_batch(pred, tgt);
        loss += mse_loss(pred, tgt);
      }
      if (reward > max_reward) {
        max_reward = reward;
        best_reward = static_cast<std::size_t>(c);
      }
      if (loss < min_loss) {
        min_loss = loss;
        best_loss = static_cast<std::size_t>(c);
      }
    }
    if (best_reward == best_loss) ++agree;
  }
  return {agree == 1000, fmt("argmax reward == argmin loss in %zu/1000 trials", agree)};
}

// ---------------------------------------------------------------------------
// 7

Outcome mlsf_isolation() {
  SynthSpec spec;
  spec.languages = {"ASL", "GSL", "CSL"};
  spec.clips = 12;
  spec.seed = 77;
  const auto corpus = from_synth(generate(spec));
  ModelConfig mc;
  mc.max_sent_length = 32;
  auto model = build_mlsf(corpus, mc, {512, false}, 7);
  const auto b0 = model.registry.at("GSL").checksum(), c0 = model.registry.at("CSL").checksum();
  const auto a0 = model.registry.at("ASL").checksum();
  PrioritizedDataset data(transcript_pose_samples(filter_language(corpus, "ASL"), model.vocabs.at("ASL")));
  RLConfig rc;
  rc.batch_size = 2;
  rc.epochs = 1000;
  rc.max_steps = 100;
  rc.seed = 1;
  const auto log = train(model.registry, "ASL", data, rc);
  const bool others = model.registry.at("GSL").checksum() == b0 && model.registry.at("CSL").checksum() == c0;
  const bool moved = model.registry.at("ASL").checksum() != a0;
  model.registry.remove_language("ASL");
  bool raised = false;
  try {
    generate_pose(model.registry, "ASL", std::vector<TokenId>{kBosId, kEosId});
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::UnknownLanguage;
  }
  return {log.steps == 100 && others && moved && raised,
          fmt("%zu steps on ASL; GSL/CSL checksums %s; ASL %s; generate after removal %s", log.steps,
              others ? "unchanged" : "CHANGED", moved ? "updated" : "NOT UPDATED",
              raised ? "raised UnknownLanguage" : "DID NOT RAISE")};
}

// ---------------------------------------------------------------------------
// 8

Outcome langgloss_guarantees() {
  const auto tags = LanguageTags::defaults();
  const auto& langs = tags.tags();
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> len(0, 12), wlen(1, 8), lang(0, langs.size() - 1);
  std::uniform_int_distribution<int> letter(0, 25);
  auto word = [&] {
    std::string w(wlen(rng), 'A');
    for (auto& c : w) c = static_cast<char>('A' + letter(rng));
    return w;
  };
  std::size_t clean = 0, flagged = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::string> gloss(len(rng));
    for (auto& g : gloss) g = word();
    const auto& L = langs[lang(rng)];
    auto stream = to_langgloss(gloss, L, tags);
    if (detect_violation(stream, L, tags).empty()) ++clean;
    std::string other;
    do other = langs[lang(rng)];
    while (other == L);
    const std::size_t at = std::uniform_int_distribution<std::size_t>(0, stream.size())(rng);
    stream.insert(stream.begin() + static_cast<std::ptrdiff_t>(at), other + "_" + word());
    const auto v = detect_violation(stream, L, tags);
    if (v.size() == 1 && v[0].index == at && v[0].kind == GlossViolationKind::CrossLanguage &&
        v[0].found_language == other)
      ++flagged;
  }
  return {clean == 10000 && flagged == 10000,
          fmt("clean %zu/10000, injected token flagged at its index %zu/10000", clean, flagged)};
}

// ---------------------------------------------------------------------------
// 9 and 10 share the seeded two-language corpus and training recipe.

SynthCorpus learn_synth() {
  SynthSpec spec;
  spec.clips = 50;
  spec.seed = 7;
  return generate(spec);
}

ModelConfig learn_model() {
  ModelConfig mc;  // Tiny
  mc.max_sent_length = 64;
  return mc;
}

RLConfig learn_training(std::uint64_t seed, std::size_t epochs) {
  RLConfig rc;
  rc.lr = 2e-3;
  rc.lr_decay = 0.01;
  rc.lr_floor = 1e-4;
  rc.batch_size = 4;
  rc.epochs = epochs;
  rc.seed = seed;
  rc.counter_weight = 25.0;
  rc.loss_mode = LossMode::RL;
  rc.plc_enabled = true;
  return rc;
}

constexpr std::size_t kMaxEpochs = 300;
constexpr std::size_t kEvalEvery = 25;

struct Curve {
  std::string label;
  std::vector<std::pair<std::size_t, double>> points;  // epoch, metric
};
std::vector<Curve> curves;

Outcome learnability() {
  const auto t0 = Clock::now();
  const auto synth = learn_synth();
  const ReverseOracle oracle(synth);
  const PoseReader reader = [&](std::span<const float> p, const std::string& l) { return oracle.decode(p, l); };
  const auto corpus = from_synth(synth);
  const auto tags = LanguageTags::defaults();
  std::string detail;
  bool ok = true;

  // MLSF: one encoder-decoder pair per language.
  {
    auto model = build_mlsf(corpus, learn_model(), {512, false}, 7);
    const double dtw0 = evaluate_mlsf(model, corpus, reader).dtw;
    std::size_t max_epochs = 0;
    for (const auto& lang : model.registry.languages()) {
      const auto part = filter_language(corpus, lang);
      const double lang_dtw0 = evaluate_mlsf(model, part, reader).dtw;
      PrioritizedDataset data(transcript_pose_samples(part, model.vocabs.at(lang)));
      Curve curve{"mlsf " + lang + " bleu1", {}};
      bool reached = false;
      TrainHooks hooks;
      hooks.evaluate = [&](std::size_t e) -> std::optional<double> {
        if (e % kEvalEvery) return std::nullopt;
        const auto r = evaluate_mlsf(model, part, reader);
        curve.points.emplace_back(e, r.bleu_1);
        reached = r.bleu_1 >= 0.9 && r.dtw <= 0.25 * lang_dtw0;
        return r.dtw;
      };
      hooks.stop = [&](const EpochRecord&) { return reached; };
      const auto log = train(model.registry, lang, data,
                             learn_training(derive_seed(7, std::string_view(lang)), kMaxEpochs), hooks);
      max_epochs = std::max(max_epochs, log.epochs.size());
      curves.push_back(curve);
    }
    const auto r = evaluate_mlsf(model, corpus, reader);
    const bool pass = r.bleu_1 >= 0.9 && r.dtw <= 0.25 * dtw0 && max_epochs <= kMaxEpochs;
    ok = ok && pass;
    detail += fmt("MLSF bleu1 %.3f dtw %.3f/%.3f=%.1f%% epochs<=%zu; ", r.bleu_1, r.dtw, dtw0,
                  100 * r.dtw / dtw0, max_epochs);
  }
  const double mlsf_secs = seconds_since(t0);

  // Prompt2LangGloss: gloss stage, then pose stage on gold LangGloss.
  const auto t1 = Clock::now();
  {
    auto model = build_p2lg(corpus, learn_model(), {512, false}, tags, 7);
    const double dtw0 = evaluate_p2lg(model, corpus, reader, tags).dtw;
    std::vector<std::vector<TokenId>> prompt_ids;
    std::vector<std::vector<std::string>> gold;
    for (const auto& it : corpus) {
      prompt_ids.push_back(encode(tokenize_text(it.prompt, model.prompt_vocab.case_sensitive()), model.prompt_vocab).ids);
      gold.push_back(item_langgloss(it, tags));
    }
    auto gloss_exact = [&] {
      std::size_t n = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto mem = encode(model.gloss_stage, prompt_ids[i]);
        if (decode(decode_gloss(model.gloss_stage, mem), model.gloss_vocab) == gold[i]) ++n;
      }
      return static_cast<double>(n) / static_cast<double>(corpus.size());
    };

    PrioritizedDataset gdata(prompt_gloss_samples(corpus, model.prompt_vocab, model.gloss_vocab, tags));
    Curve gcurve{"p2lg gloss exact", {}};
    bool gloss_done = false;
    TrainHooks gh;
    gh.evaluate = [&](std::size_t e) -> std::optional<double> {
      if (e % kEvalEvery) return std::nullopt;
      const double x = gloss_exact();
      gcurve.points.emplace_back(e, x);
      gloss_done = x == 1.0;
      return std::nullopt;
    };
    gh.stop = [&](const EpochRecord&) { return gloss_done; };
    const auto glog = train(model.gloss_stage, gdata, learn_training(derive_seed(7, std::string_view("gloss_stage")), kMaxEpochs), gh);
    curves.push_back(gcurve);

    PrioritizedDataset pdata(gloss_pose_samples(corpus, model.gloss_vocab, tags));
    Curve pcurve{"p2lg e2e bleu1", {}};
    bool reached = false;
    TrainHooks ph;
    ph.evaluate = [&](std::size_t e) -> std::optional<double> {
      if (e % kEvalEvery) return std::nullopt;
      const auto r = evaluate_p2lg(model, corpus, reader, tags);
      pcurve.points.emplace_back(e, r.bleu_1);
      reached = r.bleu_1 >= 0.9 && r.dtw <= 0.25 * dtw0;
      return r.dtw;
    };
    ph.stop = [&](const EpochRecord&) { return reached; };
    const auto plog = train(model.pose_stage, pdata, learn_training(derive_seed(7, std::string_view("pose_stage")), kMaxEpochs), ph);
    curves.push_back(pcurve);

    const auto r = evaluate_p2lg(model, corpus, reader, tags);
    const std::size_t epochs = std::max(glog.epochs.size(), plog.epochs.size());
    const bool pass = r.bleu_1 >= 0.9 && r.dtw <= 0.25 * dtw0 && epochs <= kMaxEpochs;
    ok = ok && pass;
    detail += fmt("P2LG bleu1 %.3f dtw %.3f/%.3f=%.1f%% epochs gloss %zu pose %zu; ", r.bleu_1, r.dtw,
                  dtw0, 100 * r.dtw / dtw0, glog.epochs.size(), plog.epochs.size());
  }
  const double p2lg_secs = seconds_since(t1);
  ok = ok && mlsf_secs < 600 && p2lg_secs < 600;
  detail += fmt("%.0fs + %.0fs", mlsf_secs, p2lg_secs);
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 10

constexpr std::size_t kTrendEvery = 5;

// Epochs until DTW <= 25% of the untrained model's, or nullopt.
std::optional<std::size_t> epochs_to_threshold(const Corpus& part, const Vocab& vocab, bool plc,
                                               std::uint64_t seed, Curve& curve) {
  const auto samples = transcript_pose_samples(part, vocab);
  auto pair = build(learn_model(), HeadKind::Pose, vocab.size(), 0, derive_seed(seed, std::string_view("init")));
  auto dev = [&] {
    double s = 0;
    for (std::size_t i = 0; i < part.size(); ++i) s += dtw(generate_pose(pair, samples[i].source), part[i].pose);
    return s / static_cast<double>(part.size());
  };
  const double threshold = 0.25 * dev();
  PrioritizedDataset data(samples);
  auto rc = learn_training(derive_seed(seed, std::string_view("train")), kMaxEpochs);
  rc.plc_enabled = plc;
  rc.loss_mode = plc ? LossMode::RL : LossMode::MSE;
  std::optional<std::size_t> hit;
  TrainHooks hooks;
  hooks.evaluate = [&](std::size_t e) -> std::optional<double> {
    if (e % kTrendEvery) return std::nullopt;
    const double d = dev();
    curve.points.emplace_back(e, d);
    if (!hit && d <= threshold) hit = e;
    return d;
  };
  hooks.stop = [&](const EpochRecord&) { return hit.has_value(); };
  train(pair, data, rc, hooks);
  return hit;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome plc_trend() {
  const auto synth = learn_synth();
  const auto corpus = from_synth(synth);
  const auto part = filter_language(corpus, "ASL");
  const auto vocab = transcript_vocab(part, 512, false);
  std::vector<double> with_plc, uniform;
  std::string runs;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    for (bool plc : {true, false}) {
      Curve c{fmt("trend seed %llu %s dtw", static_cast<unsigned long long>(s), plc ? "plc" : "uniform"), {}};
      const auto e = epochs_to_threshold(part, vocab, plc, s, c);
      curves.push_back(c);
      // A run that never reaches the threshold counts as one evaluation past the budget.
      const double v = e ? static_cast<double>(*e) : static_cast<double>(kMaxEpochs + kTrendEvery);
      (plc ? with_plc : uniform).push_back(v);
      runs += e ? std::to_string(*e) : std::string("none");
      runs += plc ? "/" : " ";
    }
  }
  const double mp = median(with_plc), mu = median(uniform);
  return {mp <= 1.05 * mu,
          fmt("median epochs PLC %.0f vs uniform %.0f (ratio %.3f); plc/uniform per seed: %s", mp, mu,
              mp / mu, runs.c_str())};
}

// ---------------------------------------------------------------------------
// 11

// Minimum-cost monotone path by exhaustive enumeration; ties prefer the
// shorter path. Returns cost / length.
double dtw_brute(std::span<const float> a, std::span<const float> b) {
  const std::size_t A = a.size() / kPoseWidth, B = b.size() / kPoseWidth;
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < kPoseWidth; ++k) {
      const double d = static_cast<double>(a[i * kPoseWidth + k]) - b[j * kPoseWidth + k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  double best_cost = INFINITY;
  std::size_t best_len = 0;
  std::function<void(std::size_t, std::size_t, double, std::size_t)> walk =
      [&](std::size_t i, std::size_t j, double cost, std::size_t len) {
        cost += dist(i, j);
        ++len;
        if (i == A - 1 && j == B - 1) {
          if (cost < best_cost || (cost == best_cost && len < best_len)) {
            best_cost = cost;
            best_len = len;
          }
          return;
        }
        if (i + 1 < A) walk(i + 1, j, cost, len);
        if (j + 1 < B) walk(i, j + 1, cost, len);
        if (i + 1 < A && j + 1 < B) walk(i + 1, j + 1, cost, len);
      };
  walk(0, 0, 0.0, 0);
  return best_cost / static_cast<double>(best_len);
}

Outcome metric_oracles() {
  std::vector<std::string> failed;
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  const Tokens abc{"a", "b", "c"}, abd{"a", "b", "d"}, axb{"a", "x", "b"}, ab{"a", "b"};
  const Tokens sentence{"the", "cat", "sat", "on", "the", "mat"};
  if (!near(bleu_n(abc, abd, 1), 2.0 / 3.0)) failed.push_back("bleu 'a b c'/'a b d'");
  for (int n = 1; n <= 4; ++n)
    if (!near(bleu_n(sentence, sentence, n), 1.0)) failed.push_back("bleu identical");
  if (bleu_n({"x", "y"}, {"a", "b"}, 1) > 1e-8) failed.push_back("bleu disjoint");
  if (bleu_n({}, abc, 1) != 0.0) failed.push_back("bleu empty");
  if (!near(rouge(axb, ab), 0.8)) failed.push_back("rouge 'a x b'/'a b'");
  if (!near(rouge(abc, abc), 1.0)) failed.push_back("rouge identical");
  if (rouge({}, abc) != 0.0) failed.push_back("rouge empty");

  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::normal_distribution<float> v(0.0f, 1.0f);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<float> a(len(rng) * kPoseWidth), b(len(rng) * kPoseWidth);
    for (auto& x : a) x = v(rng);
    for (auto& x : b) x = v(rng);
    const double fast = dtw(a, b), brute = dtw_brute(a, b);
    worst = std::max(worst, std::abs(fast - brute) / std::max(1.0, brute));
  }
  if (worst > 1e-9) failed.push_back("dtw vs brute force");
  std::string detail = fmt("bleu/rouge hand cases; dtw vs enumeration on 100 instances (T<=4), max rel diff %.1e", worst);
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------------------
// 12

int run(const std::string& cmd) {
  const std::string full = cmd + " >/dev/null 2>>\"" + (opts.work / "cli_errors.log").string() + "\"";
  return std::system(full.c_str());
}

// Relative path -> bytes for every file under `root`.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return files;
}

Outcome reproducibility() {
  if (opts.cli.empty()) return {false, "no --cli given"};
  const fs::path root = opts.work / "repro";
  fs::remove_all(root);
  fs::create_directories(root);

  // Inputs shared by both runs: a small corpus and OpenPose documents.
  SynthSpec spec;
  spec.clips = 6;
  spec.seed = 5;
  const auto synth = generate(spec);
  const fs::path raw = root / "raw";
  for (const auto& c : synth.clips) {
    const std::size_t T = c.pose.size() / kPoseWidth;
    for (std::size_t t = 0; t < T; ++t) {
      Frame2D f;
      for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
        f.x[j] = 0.5 + 0.1 * c.pose[t * kPoseWidth + 3 * j];
        f.y[j] = 0.5 + 0.1 * c.pose[t * kPoseWidth + 3 * j + 1];
        f.w[j] = 0.9;
      }
      if (t == 1) f.w[5] = 0.0;  // something for cleaning to repair
      write_file(raw / c.id / fmt("%s_%012zu_keypoints.json", c.id.c_str(), t), to_openpose_json(f));
    }
  }
  write_file(root / "run.json", R"({
  "seed": 3,
  "model": {"size_class": "tiny", "max_sent_length": 24},
  "vocab": {"size": 512, "case_sensitive": false},
  "training": {"epochs": 2, "batch_size": 4, "lr": 0.002, "plc": true, "loss_mode": "rl",
               "counter_weight": 25, "eval_every": 1},
  "synth": {"languages": ["ASL", "GSL"], "clips": 6}
})");

  const std::string cli = "\"" + opts.cli + "\"";
  const fs::path out = root / "out";
  const std::string O = "\"" + out.string() + "\"", R = "\"" + root.string() + "\"";
  const std::vector<std::string> steps = {
      "synth --config " + R + "/run.json --out " + O + "/syn",
      "ingest --input " + R + "/raw --transcripts " + O + "/syn/transcripts.tsv --out " + O + "/clips.sfca",
      "lift --in " + O + "/clips.sfca --out " + O + "/lift --noise 0.01",
      "pack --in " + O + "/lift/poses.sfca --out " + O + "/poses.skels",
      "prompts --transcripts " + O + "/syn/transcripts.tsv --k 2 --out " + O + "/prompts.tsv",
      "vocab --from gloss --langgloss --in " + O + "/syn/gloss.tsv --out " + O + "/gloss.vocab",
      "train --mode mlsf --config " + R + "/run.json --data " + O + "/syn/corpus.skels --transcripts " + O +
          "/syn/transcripts.tsv --out " + O + "/mlsf",
      "train --mode p2lg --config " + R + "/run.json --data " + O + "/syn/corpus.skels --transcripts " + O +
          "/syn/transcripts.tsv --prompts " + O + "/syn/prompts.tsv --gloss " + O + "/syn/gloss.tsv --out " + O +
          "/p2lg",
      "generate --ckpt " + O + "/mlsf --lang GSL --text \"" + synth.clips.back().transcript + "\" --out " + O +
          "/gen_mlsf.skels",
      "generate --ckpt " + O + "/p2lg --lang ASL --prompt \"" + synth.clips.front().prompt + "\" --out " + O +
          "/gen_p2lg.skels",
      "evaluate --fwd " + O + "/mlsf --rev " + O + "/syn/reverse.sfca --data " + O + "/syn/corpus.skels --transcripts " +
          O + "/syn/transcripts.tsv --report " + O + "/report_mlsf.json",
      "evaluate --fwd " + O + "/p2lg --rev " + O + "/syn/reverse.sfca --data " + O + "/syn/corpus.skels --transcripts " +
          O + "/syn/transcripts.tsv --prompts " + O + "/syn/prompts.tsv --gloss " + O + "/syn/gloss.tsv --report " + O +
          "/report_p2lg.json",
  };
  std::vector<std::map<std::string, std::string>> results;
  for (int jobs : {1, 8}) {
    fs::remove_all(out);
    for (const auto& s : steps) {
      if (const int rc = run(cli + " --jobs " + std::to_string(jobs) + " " + s); rc != 0)
        return {false, fmt("command failed (rc %d, jobs %d): %s", rc, jobs, s.c_str())};
    }
    auto snap = snapshot(out);
    std::erase_if(snap, [](const auto& kv) { return kv.first.ends_with("timing.jsonl"); });
    results.push_back(std::move(snap));
  }
  std::size_t differ = 0;
  std::string first;
  for (const auto& [k, v] : results[0]) {
    auto it = results[1].find(k);
    if (it == results[1].end() || it->second != v) {
      if (first.empty()) first = k;
      ++differ;
    }
  }
  const bool ok = differ == 0 && results[0].size() == results[1].size() && !results[0].empty() &&
                  results[0].contains("mlsf/ASL.sfca") && results[0].contains("p2lg/pose_stage.sfca");
  return {ok, fmt("%zu commands, %zu output files compared across --jobs 1/8, %zu differ%s%s", steps.size(),
                  results[0].size(), differ, first.empty() ? "" : ": first ", first.c_str())};
}

// ---------------------------------------------------------------------------

void write_curves() {
  if (opts.curves.empty() || curves.empty()) return;
  std::string text;
  for (const auto& c : curves) {
    nlohmann::ordered_json j;
    j["curve"] = c.label;
    auto& pts = j["points"] = nlohmann::ordered_json::array();
    for (const auto& [e, v] : c.points) pts.push_back({e, v});
    text += j.dump() + "\n";
  }
  write_file(opts.curves, text);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) opts.cli = argv[++i];
    else if (a == "--work" && i + 1 < argc) opts.work = argv[++i];
    else if (a == "--curves" && i + 1 < argc) opts.curves = argv[++i];
    else only.insert(std::atoi(a.c_str()));
  }
  fs::create_directories(opts.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"lifting conformance", lifting_conformance},
      {"lifting literals", lifting_literals},
      {"skels format", skels_format},
      {"gradient checks", gradient_checks},
      {"PLC law", plc_law},
      {"RL reformulation", rl_reformulation},
      {"MLSF isolation", mlsf_isolation},
      {"LangGloss guarantees", langgloss_guarantees},
      {"end-to-end learnability", learnability},
      {"PLC trend", plc_trend},
      {"metric oracles", metric_oracles},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  write_curves();
  return failures == 0 ? 0 : 1;
}
