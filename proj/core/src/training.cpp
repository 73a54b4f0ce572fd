#include "signforge/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include <json.hpp>

#include "signforge/error.hpp"
#include "signforge/parallel.hpp"
#include "signforge/storage.hpp"

namespace signforge {

using ad::Tape;
using ad::Tensor;

NewSamplePriority parse_new_sample_priority(std::string_view s) {
  if (s == "max_seen") return NewSamplePriority::MaxSeen;
  if (s == "mean_seen") return NewSamplePriority::MeanSeen;
  fail(ErrorCode::BadConfig, "new_sample_priority must be max_seen or mean_seen");
}

LossMode parse_loss_mode(std::string_view s) {
  if (s == "mse" || s == "MSE") return LossMode::MSE;
  if (s == "rl" || s == "RL") return LossMode::RL;
  fail(ErrorCode::BadConfig, "loss_mode must be mse or rl");
}

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::SGD;
  if (s == "adam") return OptimizerKind::Adam;
  fail(ErrorCode::BadConfig, "optimizer must be sgd or adam");
}

std::string_view to_string(NewSamplePriority p) {
  return p == NewSamplePriority::MaxSeen ? "max_seen" : "mean_seen";
}
std::string_view to_string(LossMode m) { return m == LossMode::MSE ? "mse" : "rl"; }
std::string_view to_string(OptimizerKind o) { return o == OptimizerKind::SGD ? "sgd" : "adam"; }

void validate(const RLConfig& c) {
  if (!(c.eta >= 0.0) || !std::isfinite(c.eta)) fail(ErrorCode::BadConfig, "eta must be >= 0");
  if (!(c.lr >= 0.0) || !std::isfinite(c.lr)) fail(ErrorCode::BadConfig, "lr must be >= 0");
  if (!(c.lr_decay >= 0.0)) fail(ErrorCode::BadConfig, "lr_decay must be >= 0");
  if (!(c.lr_floor >= 0.0)) fail(ErrorCode::BadConfig, "lr_floor must be >= 0");
  if (c.batch_size == 0) fail(ErrorCode::BadConfig, "batch_size must be >= 1");
  if (c.jobs == 0) fail(ErrorCode::BadConfig, "jobs must be >= 1");
  if (!(c.counter_weight > 0.0) || !std::isfinite(c.counter_weight))
    fail(ErrorCode::BadConfig, "counter_weight must be > 0");
}

double learning_rate(const RLConfig& c, std::size_t epoch) {
  return std::max(c.lr_floor, c.lr / (1.0 + c.lr_decay * static_cast<double>(epoch)));
}

namespace {

void require_same(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size())
    fail(ErrorCode::ShapeMismatch, "prediction has " + std::to_string(a.size()) +
                                       " values, target has " + std::to_string(b.size()));
}

}  // namespace

double mse_loss(std::span<const float> pred, std::span<const float> target) {
  require_same(pred, target);
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - target[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

double reward_of_batch(std::span<const float> pred, std::span<const float> target) {
  return -mse_loss(pred, target);
}

double sample_priority(std::span<const float> pred, std::span<const float> target) {
  require_same(pred, target);
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    s += std::abs(static_cast<double>(pred[i]) - target[i]);
  return s / static_cast<double>(pred.size());
}

std::vector<double> plc_probabilities(std::span<const double> rewards, double eta) {
  if (rewards.empty()) return {};
  std::vector<double> p(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double r = rewards[i];
    if (!(r >= 0.0) || !std::isfinite(r))
      fail(ErrorCode::InvalidArgument, "reward " + std::to_string(i) + " is negative or non-finite");
    p[i] = eta == 0.0 ? 1.0 : std::pow(std::max(r, kPriorityEpsilon), eta);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<std::size_t> plc_sample(std::span<const double> probabilities, std::size_t batch_size,
                                    std::mt19937_64& rng) {
  if (probabilities.empty()) fail(ErrorCode::InvalidArgument, "empty probability vector");
  std::discrete_distribution<std::size_t> dist(probabilities.begin(), probabilities.end());
  std::vector<std::size_t> out(batch_size);
  for (auto& i : out) i = dist(rng);
  return out;
}

std::vector<float> with_counters(std::span<const float> pose) {
  if (pose.size() % kPoseWidth != 0)
    fail(ErrorCode::WidthMismatch, "pose is not a multiple of 150 values");
  const std::size_t T = pose.size() / kPoseWidth;
  std::vector<float> out;
  out.reserve(T * kPoseFrameWidth);
  for (std::size_t t = 0; t < T; ++t) {
    out.insert(out.end(), pose.begin() + t * kPoseWidth, pose.begin() + (t + 1) * kPoseWidth);
    out.push_back(progress_counter(t, T));
  }
  return out;
}

// ---------------------------------------------------------------------------

PrioritizedDataset::PrioritizedDataset(std::vector<TrainSample> samples)
    : samples_(std::move(samples)),
      rewards_(samples_.size(), 0.0),
      seen_(samples_.size(), false),
      last_update_(samples_.size(), 0) {
  if (samples_.empty()) fail(ErrorCode::EmptyCorpus, "training set is empty");
}

std::vector<double> PrioritizedDataset::priorities(NewSamplePriority rule) const {
  double fill = 0.0;
  std::size_t n_seen = 0;
  for (std::size_t i = 0; i < rewards_.size(); ++i) {
    if (!seen_[i]) continue;
    ++n_seen;
    fill = rule == NewSamplePriority::MaxSeen ? std::max(fill, rewards_[i]) : fill + rewards_[i];
  }
  if (n_seen == 0) fill = 1.0;
  else if (rule == NewSamplePriority::MeanSeen) fill /= static_cast<double>(n_seen);
  std::vector<double> out(rewards_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = seen_[i] ? rewards_[i] : fill;
  return out;
}

void PrioritizedDataset::update(std::size_t i, double priority, std::size_t epoch) {
  if (!(priority >= 0.0) || !std::isfinite(priority))
    fail(ErrorCode::InvalidArgument, "priority must be finite and >= 0");
  rewards_.at(i) = priority;
  seen_[i] = true;
  last_update_[i] = epoch;
}

std::optional<std::size_t> PrioritizedDataset::last_update(std::size_t i) const {
  if (!seen_.at(i)) return std::nullopt;
  return last_update_[i];
}

// ---------------------------------------------------------------------------

Tensor<float> sample_loss(const EncDecPair& pair, Tape<float>& tape, const TrainSample& s,
                          std::mt19937_64* dropout_rng, double* priority, double counter_weight) {
  const auto memory = pair.encode(tape, s.source, dropout_rng);
  if (pair.head() == HeadKind::Pose) {
    const std::size_t W = kPoseFrameWidth;
    if (s.target_frames.empty() || s.target_frames.size() % W != 0)
      fail(ErrorCode::ShapeMismatch, "sample '" + s.id + "' has a malformed pose target");
    const std::size_t T = s.target_frames.size() / W;
    std::vector<float> in(T * W, 0.0f);
    std::copy(s.target_frames.begin(), s.target_frames.end() - W, in.begin() + W);
    const auto frames_in = Tensor<float>::constant({T, W}, std::move(in));
    const auto target = Tensor<float>::constant({T, W}, s.target_frames);
    const auto pred = pair.decode_pose(tape, frames_in, memory, dropout_rng);
    if (priority) *priority = sample_priority(pred.values(), s.target_frames);
    if (counter_weight == 1.0) return tape.mse(pred, target);
    // Scaling the counter column by sqrt(w) weights its squared error by w.
    std::vector<float> scale(T * W, 1.0f);
    const float c = static_cast<float>(std::sqrt(counter_weight));
    for (std::size_t t = 0; t < T; ++t) scale[t * W + kCounterIndex] = c;
    std::vector<float> scaled_target(s.target_frames);
    for (std::size_t i = 0; i < scaled_target.size(); ++i) scaled_target[i] *= scale[i];
    const auto weights = Tensor<float>::constant({T, W}, std::move(scale));
    return tape.mse(tape.multiply(pred, weights),
                    Tensor<float>::constant({T, W}, std::move(scaled_target)));
  }
  if (s.target_tokens.size() < 2)
    fail(ErrorCode::ShapeMismatch, "sample '" + s.id + "' needs at least <bos> and <eos>");
  const std::span<const TokenId> all(s.target_tokens);
  const auto tgt_in = all.first(all.size() - 1);
  const auto tgt_out = all.subspan(1);
  const auto logits = pair.decode_tokens(tape, tgt_in, memory, dropout_rng);
  if (priority) {
    const std::size_t V = pair.target_vocab();
    const auto lv = logits.values();
    double sum = 0.0;
    for (std::size_t r = 0; r < tgt_out.size(); ++r) {
      const float* row = lv.data() + r * V;
      const float mx = *std::max_element(row, row + V);
      double z = 0.0;
      for (std::size_t j = 0; j < V; ++j) z += std::exp(static_cast<double>(row[j] - mx));
      for (std::size_t j = 0; j < V; ++j) {
        const double p = std::exp(static_cast<double>(row[j] - mx)) / z;
        sum += std::abs(p - (j == tgt_out[r] ? 1.0 : 0.0));
      }
    }
    *priority = sum / static_cast<double>(tgt_out.size() * V);
  }
  return tape.cross_entropy(logits, tgt_out, kPadId);
}

std::string to_jsonl(const EpochRecord& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["mean_loss"] = r.mean_loss;
  j["mean_reward"] = r.mean_reward;
  j["dtw_dev"] = r.dtw_dev ? nlohmann::ordered_json(*r.dtw_dev) : nlohmann::ordered_json(nullptr);
  if (with_timing) j["wall_ms"] = r.wall_ms;
  j["steps"] = r.steps;
  j["lr"] = r.lr;
  j["distribution"] = r.distribution;
  j["draws"] = r.draws;
  return j.dump() + "\n";
}

TrainLog train(EncDecPair& pair, PrioritizedDataset& data, const RLConfig& config,
               const TrainHooks& hooks) {
  validate(config);
  const std::size_t N = data.size();
  const std::size_t B = config.batch_size;
  const std::size_t steps_per_epoch = (N + B - 1) / B;
  auto& params = pair.params();
  params.zero_grad();

  std::mt19937_64 sampler(derive_seed(config.seed, std::string_view("plc")));
  ad::Adam<float> adam;
  const std::vector<double> uniform(N, 1.0 / static_cast<double>(N));

  TrainLog log;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double lr = learning_rate(config, epoch);
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.lr = lr;
    rec.draws.assign(N, 0);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    bool step_limit = false;

    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      if (config.max_steps && log.steps >= config.max_steps) {
        step_limit = true;
        break;
      }
      const auto p = config.plc_enabled
                         ? plc_probabilities(data.priorities(config.new_sample_priority), config.eta)
                         : uniform;
      const auto batch = plc_sample(p, B, sampler);

      std::vector<std::unique_ptr<Tape<float>>> tapes(B);
      std::vector<double> losses(B), prios(B);
      const std::uint64_t step_seed = derive_seed(config.seed, static_cast<std::uint64_t>(log.steps));
      parallel_for(B, config.jobs, [&](std::size_t i) {
        auto tape = std::make_unique<Tape<float>>(true);
        std::mt19937_64 drop(derive_seed(step_seed, static_cast<std::uint64_t>(i)));
        const auto loss = sample_loss(pair, *tape, data.sample(batch[i]), &drop, &prios[i],
                                      config.counter_weight);
        losses[i] = static_cast<double>(loss.item());
        if (std::isfinite(losses[i])) tape->backward(loss);
        tapes[i] = std::move(tape);
      });

      for (std::size_t i = 0; i < B; ++i) {
        if (!std::isfinite(losses[i]) || !std::isfinite(prios[i])) {
          std::string ids;
          for (std::size_t k : batch) ids += (ids.empty() ? "" : ",") + data.sample(k).id;
          fail(ErrorCode::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch + 1) +
                                            ", step " + std::to_string(step + 1) + "; batch [" +
                                            ids + "]");
        }
      }
      const float w = 1.0f / static_cast<float>(B);
      for (std::size_t i = 0; i < B; ++i) params.accumulate(*tapes[i], w);
      tapes.clear();
      if (config.optimizer == OptimizerKind::Adam)
        adam.step(params, static_cast<float>(lr));
      else
        ad::sgd_step(params, static_cast<float>(lr));

      for (std::size_t i = 0; i < B; ++i) {
        data.update(batch[i], prios[i], epoch + 1);
        ++rec.draws[batch[i]];
        loss_sum += losses[i];
        ++loss_count;
      }
      ++log.steps;
      ++rec.steps;
    }

    rec.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.mean_reward = -rec.mean_loss;
    rec.distribution = config.plc_enabled
                           ? plc_probabilities(data.priorities(config.new_sample_priority), config.eta)
                           : uniform;
    if (hooks.evaluate) rec.dtw_dev = hooks.evaluate(epoch + 1);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                      .count();
    log.epochs.push_back(std::move(rec));
    if (step_limit) break;
    if (hooks.stop && hooks.stop(log.epochs.back())) break;
  }
  return log;
}

TrainLog train(LanguageRegistry& registry, std::string_view language, PrioritizedDataset& data,
               const RLConfig& config, const TrainHooks& hooks) {
  return train(registry.at(language), data, config, hooks);
}

}  // namespace signforge
