#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cann/cann_index.hpp"
#include "cann/scoring.hpp"

namespace cann {

struct RankedImage {
  Color color;
  double score;
  bool operator==(const RankedImage&) const = default;
};

/// Database images ordered by descending score, ties by ascending color.
struct Ranking {
  std::string query_id;
  std::vector<RankedImage> entries;

  std::vector<Color> colors() const;
  bool operator==(const Ranking&) const = default;
};

/// Query image: a name plus its local features (colors unused).
struct QueryImage {
  std::string name;
  PointSet features;
};

/// Sorts by descending score, then ascending color.
void sort_ranking(std::vector<RankedImage>& entries);

Ranking ranking_from_scores(const ColorScoreMap& scores, std::string query_id = {});

/// Sums the score terms of all per-feature outcomes of one query image.
Ranking rank_images(const std::vector<QueryOutcome>& outcomes, const ScoreParams& params,
                    std::string query_id = {});

/// First min(k, size) entries. Throws std::invalid_argument for k == 0.
Ranking top_k(const Ranking& ranking, std::size_t k);

enum class Normalization { kMinMax, kNone };

struct FusionWeights {
  double alpha = 0.5;  // weight of the global score
  Normalization cann_norm = Normalization::kMinMax;
  Normalization global_norm = Normalization::kMinMax;

  /// Throws std::invalid_argument unless 0 <= alpha <= 1.
  void validate() const;
};

/// alpha * global + (1 - alpha) * cann over the union of colors, each source
/// normalized over its own entries; a color missing from a source scores 0.
/// When every entry of a source has the same score they all normalize to 1.
Ranking fuse_scores(const Ranking& cann, const std::unordered_map<Color, double>& global_scores,
                    const FusionWeights& weights);

}  // namespace cann
