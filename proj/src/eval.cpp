#include "cann/eval.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <unordered_set>

#include "cann/cann_index.hpp"

namespace cann {

void Pose::validate() const {
  if (std::abs(orientation.norm() - 1.0) > 1e-9) throw std::invalid_argument("pose quaternion must be unit");
}

OracleAgreement compare_to_oracle(const std::vector<Ranking>& candidate, const std::vector<Ranking>& oracle,
                                  std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (candidate.size() != oracle.size()) throw std::invalid_argument("query sets differ in size");
  std::map<std::string, const Ranking*> by_id;
  for (const auto& r : oracle) {
    if (!by_id.emplace(r.query_id, &r).second) throw std::invalid_argument("duplicate query id " + r.query_id);
  }
  OracleAgreement out;
  out.queries = candidate.size();
  if (candidate.empty()) return out;

  double top1 = 0.0;
  double overlap = 0.0;
  for (const auto& cand : candidate) {
    const auto it = by_id.find(cand.query_id);
    if (it == by_id.end()) throw std::invalid_argument("query " + cand.query_id + " missing from oracle");
    const Ranking& truth = *it->second;
    if (!cand.entries.empty() && !truth.entries.empty() && cand.entries[0].color == truth.entries[0].color) {
      top1 += 1.0;
    } else if (cand.entries.empty() && truth.entries.empty()) {
      top1 += 1.0;
    }
    std::unordered_set<Color> truth_top;
    for (std::size_t i = 0; i < std::min(k, truth.entries.size()); ++i) truth_top.insert(truth.entries[i].color);
    std::size_t shared = 0;
    for (std::size_t i = 0; i < std::min(k, cand.entries.size()); ++i) shared += truth_top.count(cand.entries[i].color);
    overlap += static_cast<double>(shared) / static_cast<double>(k);
  }
  out.top1 = top1 / static_cast<double>(candidate.size());
  out.topk_overlap = overlap / static_cast<double>(candidate.size());
  return out;
}

ReportingQuality colored_reporting_quality(const ColorReporter& report, const PointSet& database,
                                           const PointSet& queries, double radius, double approx) {
  ReportingQuality q;
  const double wide = approx * radius;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto point = queries.point(i);
    const QueryOutcome near = brute_force_colored_nn(database, point, wide);
    const std::vector<Color> got = report(point);
    for (const auto& e : near) {
      if (e.distance <= radius) {
        ++q.oracle_colors;
        if (std::binary_search(got.begin(), got.end(), e.color)) ++q.found_colors;
      }
    }
    q.reported += got.size();
    for (const Color c : got) {
      if (near.find(c)) ++q.witnessed;
    }
  }
  if (q.oracle_colors > 0) q.recall = static_cast<double>(q.found_colors) / static_cast<double>(q.oracle_colors);
  if (q.reported > 0) q.precision = static_cast<double>(q.witnessed) / static_cast<double>(q.reported);
  return q;
}

EwbError ewb_error(std::span<const Pose> top_k, const Pose& ground_truth) {
  if (top_k.empty()) throw std::invalid_argument("EWB needs at least one pose");
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector4d quat = Eigen::Vector4d::Zero();
  const Eigen::Vector4d first = top_k.front().orientation.coeffs();
  for (const Pose& pose : top_k) {
    position += pose.position;
    Eigen::Vector4d c = pose.orientation.coeffs();
    if (c.dot(first) < 0.0) c = -c;
    quat += c;
  }
  position /= static_cast<double>(top_k.size());
  Eigen::Quaterniond mean(quat(3), quat(0), quat(1), quat(2));
  mean.normalize();

  EwbError err;
  err.translation = (position - ground_truth.position).norm();
  const double dot = std::min(1.0, std::abs(mean.dot(ground_truth.orientation.normalized())));
  err.rotation_deg = 2.0 * std::acos(dot) * 180.0 / std::numbers::pi;
  return err;
}

LatencyStats summarize_latency(std::vector<double> query_ms, double index_seconds) {
  LatencyStats s;
  s.index_seconds = index_seconds;
  s.samples = query_ms.size();
  if (query_ms.empty()) return s;
  std::sort(query_ms.begin(), query_ms.end());
  double sum = 0.0;
  for (const double v : query_ms) sum += v;
  const std::size_t n = query_ms.size();
  s.query_ms_mean = sum / static_cast<double>(n);
  s.query_ms_median = n % 2 == 1 ? query_ms[n / 2] : 0.5 * (query_ms[n / 2 - 1] + query_ms[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.query_ms_p95 = query_ms[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

void EvalReport::validate() const {
  for (const auto& f : {top1_agreement, topk_overlap, recall_within_R, precision_within_cR}) {
    if (f && (*f < 0.0 || *f > 1.0)) throw std::logic_error("report fraction outside [0, 1]");
  }
}

namespace {

std::vector<std::pair<std::string, std::optional<double>>> report_fields(const EvalReport& r) {
  std::vector<std::pair<std::string, std::optional<double>>> f = {
      {"queries", static_cast<double>(r.queries)},
      {"top1_agreement", r.top1_agreement},
      {"topk_overlap", r.topk_overlap},
      {"recall_within_R", r.recall_within_R},
      {"precision_within_cR", r.precision_within_cR},
      {"mean_ewb_translation_error", r.mean_ewb_translation_error},
      {"mean_ewb_rotation_deg", r.mean_ewb_rotation_deg},
  };
  const auto lat = r.latency;
  auto opt = [&](auto get) -> std::optional<double> {
    if (!lat) return std::nullopt;
    return get(*lat);
  };
  f.emplace_back("index_seconds", opt([](const LatencyStats& l) { return l.index_seconds; }));
  f.emplace_back("query_ms_mean", opt([](const LatencyStats& l) { return l.query_ms_mean; }));
  f.emplace_back("query_ms_median", opt([](const LatencyStats& l) { return l.query_ms_median; }));
  f.emplace_back("query_ms_p95", opt([](const LatencyStats& l) { return l.query_ms_p95; }));
  f.emplace_back("threads", opt([](const LatencyStats& l) { return static_cast<double>(l.threads); }));
  return f;
}

}  // namespace

void write_report_text(std::ostream& out, const EvalReport& report) {
  report.validate();
  out << std::setprecision(10);
  for (const auto& [key, value] : report_fields(report)) {
    if (value) out << key << ' ' << *value << '\n';
  }
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  report.validate();
  const auto fields = report_fields(report);
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
  out << '\n' << std::setprecision(10);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    if (fields[i].second) out << *fields[i].second;
  }
  out << '\n';
}

}  // namespace cann
