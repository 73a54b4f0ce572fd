#include "signforge/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "signforge/error.hpp"
#include "signforge/format.hpp"
#include "signforge/parallel.hpp"
#include "signforge/skeleton.hpp"

namespace signforge {

namespace {

std::map<Tokens, std::size_t> ngram_counts(const Tokens& t, std::size_t k) {
  std::map<Tokens, std::size_t> out;
  for (std::size_t i = 0; i + k <= t.size(); ++i)
    ++out[Tokens(t.begin() + static_cast<std::ptrdiff_t>(i),
                 t.begin() + static_cast<std::ptrdiff_t>(i + k))];
  return out;
}

}  // namespace

double bleu_n(const Tokens& candidate, const Tokens& reference, int n) {
  if (n < 1 || n > 4) fail(ErrorCode::InvalidArgument, "bleu order must be in 1..4");
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const auto cand = ngram_counts(candidate, static_cast<std::size_t>(k));
    const auto ref = ngram_counts(reference, static_cast<std::size_t>(k));
    std::size_t matched = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    const double p = total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
    log_sum += std::log(std::max(p, kBleuFloor));
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = std::min(1.0, std::exp(1.0 - r / c));
  return bp * std::exp(log_sum / n);
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double l = static_cast<double>(lcs_length(candidate, reference));
  if (l == 0.0) return 0.0;
  const double p = l / static_cast<double>(candidate.size());
  const double r = l / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

double dtw(std::span<const float> a, std::span<const float> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyClip, "dtw needs two non-empty clips");
  if (a.size() % kPoseWidth != 0 || b.size() % kPoseWidth != 0)
    fail(ErrorCode::WidthMismatch, "dtw inputs must be 150 values per frame");
  const std::size_t n = a.size() / kPoseWidth, m = b.size() / kPoseWidth;
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    const float* x = a.data() + i * kPoseWidth;
    const float* y = b.data() + j * kPoseWidth;
    for (std::size_t k = 0; k < kPoseWidth; ++k) {
      const double d = static_cast<double>(x[k]) - y[k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  struct Cell {
    double cost;
    std::size_t len;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Cell> table(n * m, Cell{inf, 0});
  auto better = [](const Cell& x, const Cell& y) {
    return x.cost < y.cost || (x.cost == y.cost && x.len < y.len);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist(i, j);
      if (i == 0 && j == 0) {
        table[0] = {d, 1};
        continue;
      }
      Cell best{inf, 0};
      if (i > 0 && better(table[(i - 1) * m + j], best)) best = table[(i - 1) * m + j];
      if (j > 0 && better(table[i * m + j - 1], best)) best = table[i * m + j - 1];
      if (i > 0 && j > 0 && better(table[(i - 1) * m + j - 1], best))
        best = table[(i - 1) * m + j - 1];
      table[i * m + j] = {best.cost + d, best.len + 1};
    }
  const Cell& end = table.back();
  return end.cost / static_cast<double>(end.len);
}

std::string to_json(const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["bleu_1"] = r.bleu_1;
  j["bleu_2"] = r.bleu_2;
  j["bleu_3"] = r.bleu_3;
  j["bleu_4"] = r.bleu_4;
  j["rouge"] = r.rouge;
  j["dtw"] = r.dtw;
  j["items"] = r.items;
  return j.dump(2) + "\n";
}

ScoreReport back_translation_eval(const std::vector<EvalItem>& items, const PoseGenerator& forward,
                                  const PoseReader& reverse, std::size_t jobs) {
  if (!reverse) fail(ErrorCode::MissingReverseModel, "back translation needs a reverse model");
  if (!forward) fail(ErrorCode::InvalidArgument, "back translation needs a forward model");
  ScoreReport report;
  report.items = items.size();
  if (items.empty()) return report;
  std::vector<std::array<double, 6>> scores(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const auto& item = items[i];
    const auto pose = forward(item);
    const auto text = reverse(pose, item.language);
    auto& s = scores[i];
    for (int k = 1; k <= 4; ++k) s[k - 1] = bleu_n(text, item.reference, k);
    s[4] = rouge(text, item.reference);
    s[5] = pose.empty() ? std::numeric_limits<double>::infinity() : dtw(pose, item.pose);
  });
  std::array<double, 6> sum{};
  for (const auto& s : scores)
    for (std::size_t k = 0; k < 6; ++k) sum[k] += s[k];
  const double n = static_cast<double>(items.size());
  report.bleu_1 = sum[0] / n;
  report.bleu_2 = sum[1] / n;
  report.bleu_3 = sum[2] / n;
  report.bleu_4 = sum[3] / n;
  report.rouge = sum[4] / n;
  report.dtw = sum[5] / n;
  return report;
}

Tokens metric_tokens(std::string_view text, bool case_sensitive) {
  Tokens out;
  for (auto t : split_spaces(text)) {
    std::string s(t);
    if (!case_sensitive)
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace signforge
