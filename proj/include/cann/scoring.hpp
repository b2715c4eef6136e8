#pragma once

#include <unordered_map>

#include "cann/types.hpp"

namespace cann {

class QueryOutcome;

/// Shape parameter p and normalization radius R of the per-image score
///
///   s_i = sum_j (1 - d_ij^(p/(1-p)))^((1-p)/p),   d_ij = min(dist / R, 1).
///
/// p close to 0 makes the term fall off quickly; p = 0.5 gives 1 - d.
class ScoreParams {
 public:
  static constexpr double kMinP = 0.01;
  static constexpr double kMaxP = 0.99;

  /// Throws std::invalid_argument unless kMinP <= p <= kMaxP and radius > 0.
  ScoreParams(double p, double radius);

  double p() const { return p_; }
  double radius() const { return radius_; }

  // p/(1-p) and its reciprocal.
  double inner_exponent() const { return inner_; }
  double outer_exponent() const { return outer_; }

 private:
  double p_;
  double radius_;
  double inner_;
  double outer_;
};

/// Contribution of one query feature whose nearest neighbor in an image lies
/// at `distance`. Distances at or beyond R clamp to 0.
double score_term(double distance, const ScoreParams& params);

/// Smallest normalized distance d* with score_term(d * R) <= epsilon for all
/// d >= d*. Requires 0 < epsilon < 1.
double tail_bound_distance(const ScoreParams& params, double epsilon);

using ColorScoreMap = std::unordered_map<Color, double>;

/// Adds score_term(distance) for every (color, distance) in the outcome.
void accumulate(ColorScoreMap& scores, const QueryOutcome& outcome, const ScoreParams& params);

}  // namespace cann
