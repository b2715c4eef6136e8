#include "cann/retrieval.hpp"

#include <algorithm>
#include <stdexcept>

namespace cann {

namespace {

std::unordered_map<Color, double> normalized(const std::unordered_map<Color, double>& scores,
                                             Normalization mode) {
  if (mode == Normalization::kNone || scores.empty()) return scores;
  double lo = scores.begin()->second;
  double hi = lo;
  for (const auto& [color, s] : scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  std::unordered_map<Color, double> out;
  out.reserve(scores.size());
  for (const auto& [color, s] : scores) out[color] = hi > lo ? (s - lo) / (hi - lo) : 1.0;
  return out;
}

}  // namespace

std::vector<Color> Ranking::colors() const {
  std::vector<Color> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.color);
  return out;
}

void sort_ranking(std::vector<RankedImage>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedImage& a, const RankedImage& b) {
    return a.score != b.score ? a.score > b.score : a.color < b.color;
  });
}

Ranking ranking_from_scores(const ColorScoreMap& scores, std::string query_id) {
  Ranking ranking{std::move(query_id), {}};
  ranking.entries.reserve(scores.size());
  for (const auto& [color, score] : scores) ranking.entries.push_back({color, score});
  sort_ranking(ranking.entries);
  return ranking;
}

Ranking rank_images(const std::vector<QueryOutcome>& outcomes, const ScoreParams& params,
                    std::string query_id) {
  ColorScoreMap scores;
  for (const auto& outcome : outcomes) accumulate(scores, outcome, params);
  return ranking_from_scores(scores, std::move(query_id));
}

Ranking top_k(const Ranking& ranking, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top-k requires k >= 1");
  Ranking out{ranking.query_id, {}};
  const std::size_t n = std::min(k, ranking.entries.size());
  out.entries.assign(ranking.entries.begin(), ranking.entries.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

void FusionWeights::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("fusion alpha must lie in [0, 1]");
}

Ranking fuse_scores(const Ranking& cann, const std::unordered_map<Color, double>& global_scores,
                    const FusionWeights& weights) {
  weights.validate();
  std::unordered_map<Color, double> cann_scores;
  for (const auto& e : cann.entries) cann_scores[e.color] = e.score;
  const auto local = normalized(cann_scores, weights.cann_norm);
  const auto global = normalized(global_scores, weights.global_norm);

  std::unordered_map<Color, double> fused;
  for (const auto& [color, s] : local) fused[color] += (1.0 - weights.alpha) * s;
  for (const auto& [color, s] : global) fused[color] += weights.alpha * s;
  return ranking_from_scores(fused, cann.query_id);
}

}  // namespace cann
