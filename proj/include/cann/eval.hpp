#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Geometry>

#include "cann/random_grid.hpp"
#include "cann/retrieval.hpp"

namespace cann {

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  /// Throws std::invalid_argument unless |orientation| = 1 within 1e-9.
  void validate() const;
};

struct OracleAgreement {
  double top1 = 0.0;
  double topk_overlap = 0.0;
  std::size_t queries = 0;
};

/// Matches rankings by query id. Throws std::invalid_argument when the two
/// sides cover different query sets or k == 0.
OracleAgreement compare_to_oracle(const std::vector<Ranking>& candidate, const std::vector<Ranking>& oracle,
                                  std::size_t k);

struct ReportingQuality {
  double recall = 1.0;
  double precision = 1.0;
  std::size_t oracle_colors = 0;  // colors with a point within R, summed over queries
  std::size_t found_colors = 0;   // of those, how many were reported
  std::size_t reported = 0;
  std::size_t witnessed = 0;      // reported colors with a point within cR
};

using ColorReporter = std::function<std::vector<Color>(std::span<const float>)>;

/// Recall against the exact within-R colors and precision against the exact
/// within-cR witnesses, pooled over all queries.
ReportingQuality colored_reporting_quality(const ColorReporter& report, const PointSet& database,
                                           const PointSet& queries, double radius, double approx);

inline ReportingQuality colored_reporting_quality(const GridIndex& index, const PointSet& database,
                                                  const PointSet& queries) {
  return colored_reporting_quality([&](std::span<const float> q) { return index.query_colors(q); }, database,
                                   queries, index.radius(), index.approx());
}

struct EwbError {
  double translation = 0.0;   // meters
  double rotation_deg = 0.0;  // degrees
};

/// Compares the equal-weight barycenter of the retrieved poses with the
/// ground truth. Orientations are averaged as a sign-aligned quaternion sum.
EwbError ewb_error(std::span<const Pose> top_k, const Pose& ground_truth);

struct LatencyStats {
  double index_seconds = 0.0;
  double query_ms_mean = 0.0;
  double query_ms_median = 0.0;
  double query_ms_p95 = 0.0;
  std::size_t samples = 0;
  std::size_t threads = 1;
};

/// Mean, median and 95th percentile (nearest rank) of per-query milliseconds.
LatencyStats summarize_latency(std::vector<double> query_ms, double index_seconds);

/// Times `repetitions` index builds and, per build, one pass of query_image(index, i)
/// over i in [0, query_count). The first pass over the queries is a warm-up
/// and is not recorded.
template <typename Build, typename QueryFn>
LatencyStats bench(Build&& build, QueryFn&& query_image, std::size_t query_count, std::size_t repetitions) {
  if (repetitions == 0) throw std::invalid_argument("bench needs at least one repetition");
  using Clock = std::chrono::steady_clock;
  double index_seconds = 0.0;
  std::vector<double> ms;
  ms.reserve(query_count * repetitions);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto t0 = Clock::now();
    const auto index = build();
    index_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    if (rep == 0) {
      for (std::size_t i = 0; i < query_count; ++i) query_image(index, i);
    }
    for (std::size_t i = 0; i < query_count; ++i) {
      const auto q0 = Clock::now();
      query_image(index, i);
      ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - q0).count());
    }
  }
  return summarize_latency(std::move(ms), index_seconds / static_cast<double>(repetitions));
}

struct EvalReport {
  std::optional<double> top1_agreement;
  std::optional<double> topk_overlap;
  std::optional<double> recall_within_R;
  std::optional<double> precision_within_cR;
  std::optional<double> mean_ewb_translation_error;
  std::optional<double> mean_ewb_rotation_deg;
  std::optional<LatencyStats> latency;
  std::size_t queries = 0;

  /// Throws std::logic_error if a fraction lies outside [0, 1].
  void validate() const;
};

/// "key value" per line; absent fields are omitted.
void write_report_text(std::ostream& out, const EvalReport& report);
/// Header row plus one value row; absent fields are empty cells.
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace cann
