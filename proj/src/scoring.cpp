#include "cann/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cann/cann_index.hpp"

namespace cann {

ScoreParams::ScoreParams(double p, double radius) : p_(p), radius_(radius) {
  if (!(p >= kMinP && p <= kMaxP)) {
    throw std::invalid_argument("score shape p must lie in [0.01, 0.99], got " + std::to_string(p));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("score radius R must be positive and finite");
  }
  inner_ = p / (1.0 - p);
  outer_ = (1.0 - p) / p;
}

double score_term(double distance, const ScoreParams& params) {
  const double d = std::clamp(distance / params.radius(), 0.0, 1.0);
  if (d >= 1.0) return 0.0;
  const double inner = 1.0 - std::pow(d, params.inner_exponent());
  return std::clamp(std::pow(inner, params.outer_exponent()), 0.0, 1.0);
}

double tail_bound_distance(const ScoreParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  // (1 - d^a)^(1/a) <= eps  <=>  d >= (1 - eps^a)^(1/a),  a = p/(1-p).
  const double a = params.inner_exponent();
  return std::pow(1.0 - std::pow(epsilon, a), 1.0 / a);
}

void accumulate(ColorScoreMap& scores, const QueryOutcome& outcome, const ScoreParams& params) {
  for (const auto& e : outcome) scores[e.color] += score_term(e.distance, params);
}

}  // namespace cann
