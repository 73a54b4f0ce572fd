#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "signforge/signmodel.hpp"

namespace signforge {

enum class NewSamplePriority { MaxSeen, MeanSeen };
enum class LossMode { MSE, RL };
enum class OptimizerKind { SGD, Adam };

NewSamplePriority parse_new_sample_priority(std::string_view s);
LossMode parse_loss_mode(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);
std::string_view to_string(NewSamplePriority p);
std::string_view to_string(LossMode m);
std::string_view to_string(OptimizerKind o);

struct RLConfig {
  double eta = 1.0;
  double lr = 1e-3;
  // lr_e = max(lr_floor, lr / (1 + lr_decay * e)) for epoch index e.
  double lr_decay = 0.0;
  double lr_floor = 0.0;
  std::size_t batch_size = 8;
  std::size_t epochs = 1;
  // Stop after this many optimizer steps (0 = no limit).
  std::size_t max_steps = 0;
  std::uint64_t seed = 0;
  bool plc_enabled = true;
  NewSamplePriority new_sample_priority = NewSamplePriority::MaxSeen;
  LossMode loss_mode = LossMode::RL;
  OptimizerKind optimizer = OptimizerKind::Adam;
  // Weight of the counter channel in the pose loss (1 = plain MSE).
  double counter_weight = 1.0;
  std::size_t jobs = 1;
};

// Throws BadConfig.
void validate(const RLConfig& c);

double learning_rate(const RLConfig& c, std::size_t epoch);

double mse_loss(std::span<const float> pred, std::span<const float> target);
// -mse_loss(pred, target).
double reward_of_batch(std::span<const float> pred, std::span<const float> target);
// Mean absolute error over all scalars.
double sample_priority(std::span<const float> pred, std::span<const float> target);

inline constexpr double kPriorityEpsilon = 1e-6;

// P(i) proportional to max(r(i), 1e-6)^eta; eta = 0 is exactly uniform.
std::vector<double> plc_probabilities(std::span<const double> rewards, double eta);
// batch_size independent draws with replacement.
std::vector<std::size_t> plc_sample(std::span<const double> probabilities, std::size_t batch_size,
                                    std::mt19937_64& rng);

struct TrainSample {
  std::string id;
  std::vector<TokenId> source;         // <bos> ... <eos>
  std::vector<TokenId> target_tokens;  // token head: <bos> ... <eos>
  std::vector<float> target_frames;    // pose head: T x 151 with counters
};

// Builds the T x 151 decoder target from a T x 150 pose.
std::vector<float> with_counters(std::span<const float> pose);

class PrioritizedDataset {
 public:
  explicit PrioritizedDataset(std::vector<TrainSample> samples);

  std::size_t size() const noexcept { return samples_.size(); }
  const TrainSample& sample(std::size_t i) const { return samples_.at(i); }
  const std::vector<TrainSample>& samples() const noexcept { return samples_; }

  // Current priority of every sample; unseen ones take the max (or mean)
  // of the seen priorities, or 1 when nothing has been seen yet.
  std::vector<double> priorities(NewSamplePriority rule) const;
  void update(std::size_t i, double priority, std::size_t epoch);
  bool seen(std::size_t i) const { return seen_.at(i); }
  std::optional<std::size_t> last_update(std::size_t i) const;

 private:
  std::vector<TrainSample> samples_;
  std::vector<double> rewards_;
  std::vector<bool> seen_;
  std::vector<std::size_t> last_update_;
};

struct SampleResult {
  double loss = 0.0;
  double priority = 0.0;
};

// Forward pass of one sample (teacher forcing). With a recording tape the
// caller may run backward on the returned loss.
ad::Tensor<float> sample_loss(const EncDecPair& pair, ad::Tape<float>& tape, const TrainSample& s,
                              std::mt19937_64* dropout_rng, double* priority,
                              double counter_weight = 1.0);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double mean_reward = 0.0;
  std::optional<double> dtw_dev;
  double wall_ms = 0.0;
  std::size_t steps = 0;
  double lr = 0.0;
  std::vector<double> distribution;  // sampling probabilities at epoch end
  std::vector<std::size_t> draws;    // times each sample was drawn
};

// Line-delimited JSON; wall_ms is omitted when `with_timing` is false.
std::string to_jsonl(const EpochRecord& r, bool with_timing = true);

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t steps = 0;
};

// Called after every epoch with the 1-based epoch number; the returned
// value is logged as dtw_dev. Returning true from `stop` ends training.
struct TrainHooks {
  std::function<std::optional<double>(std::size_t epoch)> evaluate;
  std::function<bool(const EpochRecord&)> stop;
};

// Throws DivergedLoss naming the epoch, step and sample ids of the batch.
TrainLog train(EncDecPair& pair, PrioritizedDataset& data, const RLConfig& config,
               const TrainHooks& hooks = {});
TrainLog train(LanguageRegistry& registry, std::string_view language, PrioritizedDataset& data,
               const RLConfig& config, const TrainHooks& hooks = {});

}  // namespace signforge
