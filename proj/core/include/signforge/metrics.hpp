#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace signforge {

using Tokens = std::vector<std::string>;

inline constexpr double kBleuFloor = 1e-9;

// Geometric mean of clipped k-gram precisions (k = 1..n, each floored at
// 1e-9) times the brevity penalty min(1, exp(1 - |ref| / |cand|)).
// An empty candidate scores 0. Throws InvalidArgument unless 1 <= n <= 4.
double bleu_n(const Tokens& candidate, const Tokens& reference, int n);

// ROUGE-L F1 (beta = 1).
double rouge(const Tokens& candidate, const Tokens& reference);
std::size_t lcs_length(const Tokens& a, const Tokens& b);

// Length-normalized DTW over 150-wide frames: minimal total Euclidean cost
// of a monotone alignment anchored at both ends, divided by the number of
// cells on that path (the shorter path wins ties). Throws EmptyClip or
// WidthMismatch.
double dtw(std::span<const float> a, std::span<const float> b);

struct ScoreReport {
  double bleu_1 = 0.0;
  double bleu_2 = 0.0;
  double bleu_3 = 0.0;
  double bleu_4 = 0.0;
  double rouge = 0.0;
  double dtw = 0.0;
  std::size_t items = 0;
};

std::string to_json(const ScoreReport& r);

struct EvalItem {
  std::string id;
  std::string language;
  Tokens reference;               // transcript tokens
  std::vector<float> pose;        // ground truth, T x 150
};

// Generates a pose for an item (the forward model).
using PoseGenerator = std::function<std::vector<float>(const EvalItem&)>;
// Reads a pose back into text (the reverse model).
using PoseReader = std::function<Tokens(std::span<const float> pose, const std::string& language)>;

// Per-item scores averaged over the set. Throws MissingReverseModel when
// `reverse` is empty. Items are scored on up to `jobs` threads; the result
// does not depend on `jobs`.
ScoreReport back_translation_eval(const std::vector<EvalItem>& items, const PoseGenerator& forward,
                                  const PoseReader& reverse, std::size_t jobs = 1);

// Token lists as used by the metrics: whitespace split, lowercased unless
// case_sensitive.
Tokens metric_tokens(std::string_view text, bool case_sensitive = false);

}  // namespace signforge
