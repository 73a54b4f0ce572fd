#include <benchmark/benchmark.h>

#include <random>

#include "signforge/langgloss.hpp"
#include "signforge/lift3d.hpp"
#include "signforge/metrics.hpp"
#include "signforge/signmodel.hpp"
#include "signforge/storage.hpp"
#include "signforge/tensor.hpp"

using namespace signforge;

namespace {

Clip2D random_clip(std::size_t frames) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Clip2D c;
  c.id = "bench";
  for (std::size_t t = 0; t < frames; ++t) {
    Frame2D f;
    for (std::size_t j = 0; j < JointLayout::kJointCount; ++j) {
      f.x[j] = u(rng);
      f.y[j] = u(rng);
      f.w[j] = 1;
    }
    c.frames.push_back(f);
  }
  return c;
}

std::vector<float> random_pose(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1, 1);
  std::vector<float> v(frames * kPoseWidth);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_Lift(benchmark::State& state) {
  const auto clip = random_clip(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lift_clip(clip, standard_structure(), {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Lift)->Arg(32)->Arg(256);

void BM_PackSkels(benchmark::State& state) {
  std::vector<PoseClip> clips;
  for (int i = 0; i < 16; ++i) clips.push_back({"c" + std::to_string(i), random_pose(64, i)});
  std::size_t bytes = 0;
  for (auto _ : state) {
    const auto files = pack_skels(clips);
    bytes = files.skels.size();
    benchmark::DoNotOptimize(files);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_PackSkels);

void BM_UnpackSkels(benchmark::State& state) {
  std::vector<PoseClip> clips;
  for (int i = 0; i < 16; ++i) clips.push_back({"c" + std::to_string(i), random_pose(64, i)});
  const auto files = pack_skels(clips);
  for (auto _ : state) benchmark::DoNotOptimize(unpack_skels(files.skels));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * files.skels.size()));
}
BENCHMARK(BM_UnpackSkels);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<float> v(n * n, 0.5f);
  const auto a = ad::Tensor<float>::constant({n, n}, v);
  const auto b = ad::Tensor<float>::constant({n, n}, v);
  for (auto _ : state) {
    ad::Tape<float> tape(false);
    benchmark::DoNotOptimize(tape.matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128);

void BM_TinyForwardBackward(benchmark::State& state) {
  auto config = ModelConfig::for_size(SizeClass::Tiny);
  config.max_sent_length = 32;
  const auto pair = build(config, HeadKind::Pose, 32, 0, 1);
  const std::vector<TokenId> src{kBosId, 5, 6, 7, kEosId};
  const std::vector<float> frames(16 * kPoseFrameWidth, 0.1f);
  for (auto _ : state) {
    ad::Tape<float> tape;
    const auto memory = pair.encode(tape, src);
    const auto in = ad::Tensor<float>::constant({16, kPoseFrameWidth}, frames);
    const auto out = pair.decode_pose(tape, in, memory);
    const auto loss = tape.mse(out, in);
    tape.backward(loss);
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(BM_TinyForwardBackward);

void BM_Dtw(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  const auto a = random_pose(t, 1), b = random_pose(t, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dtw(a, b));
}
BENCHMARK(BM_Dtw)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
