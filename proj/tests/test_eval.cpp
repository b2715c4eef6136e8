#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "cann/cann_index.hpp"
#include "cann/eval.hpp"
#include "test_util.hpp"

namespace cann {
namespace {

using testing::random_points;

Ranking ranking_of(const std::string& id, std::vector<Color> colors) {
  Ranking r{id, {}};
  double s = static_cast<double>(colors.size());
  for (Color c : colors) r.entries.push_back({c, s--});
  return r;
}

Eigen::Quaterniond about_z(double degrees) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(degrees * std::numbers::pi / 180.0, Eigen::Vector3d::UnitZ()));
}

TEST(CompareToOracle, IdenticalRankings) {
  const std::vector<Ranking> r{ranking_of("a", {1, 2, 3}), ranking_of("b", {4, 5})};
  const auto agree = compare_to_oracle(r, r, 2);
  EXPECT_EQ(agree.top1, 1.0);
  EXPECT_EQ(agree.topk_overlap, 1.0);
  EXPECT_EQ(agree.queries, 2u);
}

TEST(CompareToOracle, DisjointTopK) {
  const std::vector<Ranking> a{ranking_of("q", {1, 2, 3})};
  const std::vector<Ranking> b{ranking_of("q", {4, 5, 6})};
  const auto agree = compare_to_oracle(a, b, 3);
  EXPECT_EQ(agree.top1, 0.0);
  EXPECT_EQ(agree.topk_overlap, 0.0);
}

TEST(CompareToOracle, MatchesByQueryId) {
  const std::vector<Ranking> a{ranking_of("x", {1}), ranking_of("y", {2})};
  const std::vector<Ranking> b{ranking_of("y", {2}), ranking_of("x", {1})};
  EXPECT_EQ(compare_to_oracle(a, b, 1).top1, 1.0);
}

TEST(CompareToOracle, RandomizedOverlapBySetArithmetic) {
  std::mt19937_64 rng(1);
  std::vector<Ranking> cand, truth;
  const std::size_t k = 5;
  double expected_overlap = 0.0;
  double expected_top1 = 0.0;
  for (int q = 0; q < 20; ++q) {
    std::vector<Color> a(30), b(30);
    std::iota(a.begin(), a.end(), 0u);
    std::iota(b.begin(), b.end(), 0u);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    a.resize(8 + q % 3);
    b.resize(8);
    const std::set<Color> ta(a.begin(), a.begin() + k), tb(b.begin(), b.begin() + k);
    std::vector<Color> both;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(both));
    expected_overlap += static_cast<double>(both.size()) / k;
    expected_top1 += a[0] == b[0];
    cand.push_back(ranking_of("q" + std::to_string(q), a));
    truth.push_back(ranking_of("q" + std::to_string(q), b));
  }
  const auto agree = compare_to_oracle(cand, truth, k);
  EXPECT_NEAR(agree.topk_overlap, expected_overlap / 20, 1e-12);
  EXPECT_NEAR(agree.top1, expected_top1 / 20, 1e-12);
}

TEST(CompareToOracle, QuerySetMismatch) {
  const std::vector<Ranking> a{ranking_of("x", {1})};
  const std::vector<Ranking> b{ranking_of("y", {1})};
  EXPECT_THROW(compare_to_oracle(a, b, 1), std::invalid_argument);
  EXPECT_THROW(compare_to_oracle(a, {}, 1), std::invalid_argument);
  EXPECT_THROW(compare_to_oracle(a, a, 0), std::invalid_argument);
}

TEST(ReportingQuality, ManyGridsOnTinyDataFindEverything) {
  // In one dimension a pair at distance <= R shares a cell with probability
  // at least 1 - 1/c per grid, so 500 grids miss it with odds below 1e-8.
  const auto pts = random_points(20, 1, 5, 2.0, 2);
  const auto index = GridIndex::build(pts, 0.5, 1.1, 500, 3);
  const auto queries = random_points(40, 1, 1, 2.0, 4);
  const auto q = colored_reporting_quality(index, pts, queries);
  EXPECT_GT(q.oracle_colors, 10u);
  EXPECT_EQ(q.recall, 1.0);
  EXPECT_EQ(q.precision, 1.0);
}

TEST(ReportingQuality, PrecisionOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = random_points(1000, 8, 40, 1.0, 10 + seed);
    const auto index = GridIndex::build(pts, 0.4, 1.1, 16, 20 + seed);
    const auto q = colored_reporting_quality(index, pts, pts);
    EXPECT_GE(q.precision, 0.999);
    EXPECT_GT(q.reported, 0u);
  }
}

TEST(ReportingQuality, CountsByHand) {
  PointSet db(1);
  db.add(std::vector<float>{0.0f}, 0);
  db.add(std::vector<float>{1.05f}, 1);
  db.add(std::vector<float>{5.0f}, 2);
  PointSet queries(1);
  queries.add(std::vector<float>{0.0f}, 0);
  // Reports color 0 (within R), color 1 (within cR only) and color 2 (no witness).
  const ColorReporter reporter = [](std::span<const float>) { return std::vector<Color>{0, 1, 2}; };
  const auto q = colored_reporting_quality(reporter, db, queries, 1.0, 1.1);
  EXPECT_EQ(q.oracle_colors, 1u);
  EXPECT_EQ(q.recall, 1.0);
  EXPECT_EQ(q.reported, 3u);
  EXPECT_EQ(q.witnessed, 2u);
  EXPECT_NEAR(q.precision, 2.0 / 3.0, 1e-12);
}

TEST(Ewb, PerfectPoses) {
  Pose truth{{1, 2, 3}, about_z(30)};
  const std::vector<Pose> top{truth, truth, truth};
  const auto e = ewb_error(top, truth);
  EXPECT_NEAR(e.translation, 0.0, 1e-12);
  EXPECT_NEAR(e.rotation_deg, 0.0, 1e-6);
}

TEST(Ewb, SymmetricPositionsCancel) {
  const Pose truth{{0, 0, 0}, Eigen::Quaterniond::Identity()};
  const std::vector<Pose> top{{{2, -1, 0}, Eigen::Quaterniond::Identity()}, {{-2, 1, 0}, Eigen::Quaterniond::Identity()}};
  EXPECT_NEAR(ewb_error(top, truth).translation, 0.0, 1e-12);
}

TEST(Ewb, ThreePoseArithmetic) {
  // Mean of (1,0,0), (0,2,0), (0,0,3) is (1/3, 2/3, 1): sqrt(14/9) = 1.2472191289246471 from the origin.
  const Pose truth{{0, 0, 0}, Eigen::Quaterniond::Identity()};
  const std::vector<Pose> top{{{1, 0, 0}, Eigen::Quaterniond::Identity()},
                              {{0, 2, 0}, Eigen::Quaterniond::Identity()},
                              {{0, 0, 3}, Eigen::Quaterniond::Identity()}};
  EXPECT_NEAR(ewb_error(top, truth).translation, 1.2472191289246471, 1e-12);
}

TEST(Ewb, SignAlignedRotationMean) {
  const Pose truth{{0, 0, 0}, Eigen::Quaterniond::Identity()};
  Eigen::Quaterniond flipped = about_z(90);
  flipped.coeffs() *= -1.0;
  const std::vector<Pose> top{{{0, 0, 0}, Eigen::Quaterniond::Identity()}, {{0, 0, 0}, flipped}};
  EXPECT_NEAR(ewb_error(top, truth).rotation_deg, 45.0, 1e-9);
}

TEST(Ewb, SinglePoseIsPlainPoseError) {
  const Pose truth{{1, 1, 1}, about_z(10)};
  const std::vector<Pose> top{{{4, 5, 1}, about_z(25)}};
  const auto e = ewb_error(top, truth);
  EXPECT_NEAR(e.translation, 5.0, 1e-12);
  EXPECT_NEAR(e.rotation_deg, 15.0, 1e-9);
}

TEST(Ewb, RejectsEmpty) { EXPECT_THROW(ewb_error({}, Pose{}), std::invalid_argument); }

TEST(Pose, ValidatesUnitQuaternion) {
  Pose p;
  EXPECT_NO_THROW(p.validate());
  p.orientation = Eigen::Quaterniond(2, 0, 0, 0);
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Latency, Summary) {
  const auto s = summarize_latency({5, 1, 3, 2, 4, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}, 2.5);
  EXPECT_EQ(s.index_seconds, 2.5);
  EXPECT_EQ(s.samples, 20u);
  EXPECT_DOUBLE_EQ(s.query_ms_mean, 10.5);
  EXPECT_DOUBLE_EQ(s.query_ms_median, 10.5);
  EXPECT_DOUBLE_EQ(s.query_ms_p95, 19.0);
}

TEST(Bench, SingleRepetitionFinitePositive) {
  const auto pts = random_points(2000, 16, 20, 1.0, 5);
  const auto queries = random_points(10, 16, 1, 1.0, 6);
  int builds = 0;
  const auto stats = bench(
      [&] {
        ++builds;
        return LadderIndex::build(pts, LadderConfig::with_defaults(0.5));
      },
      [&](const LadderIndex& index, std::size_t i) { (void)index.query(queries.point(i)); }, queries.size(), 1);
  EXPECT_EQ(builds, 1);
  EXPECT_EQ(stats.samples, 10u);
  EXPECT_GT(stats.index_seconds, 0.0);
  EXPECT_TRUE(std::isfinite(stats.query_ms_mean));
  EXPECT_GT(stats.query_ms_mean, 0.0);
  EXPECT_LE(stats.query_ms_median, stats.query_ms_p95);
  EXPECT_THROW(bench([] { return 0; }, [](int, std::size_t) {}, 1, 0), std::invalid_argument);
}

TEST(Bench, LatencyGrowsWithSize) {
  // Linear-scan query images over five database sizes, several repetitions.
  const auto queries = random_points(20, 32, 1, 1.0, 7);
  std::vector<double> means;
  for (std::size_t n : {1000, 2000, 4000, 8000, 16000}) {
    const auto pts = random_points(n, 32, 50, 1.0, 8 + n);
    const auto stats = bench([&] { return BruteForceIndex(pts, 1.0); },
                             [&](const BruteForceIndex& index, std::size_t i) { (void)index.query(queries.point(i)); },
                             queries.size(), 3);
    means.push_back(stats.query_ms_mean);
  }
  for (std::size_t i = 1; i < means.size(); ++i) EXPECT_GE(means[i], means[i - 1]) << i;
}

TEST(Report, TextAndCsv) {
  EvalReport r;
  r.queries = 3;
  r.top1_agreement = 0.5;
  r.recall_within_R = 1.0;
  LatencyStats lat;
  lat.index_seconds = 1.25;
  lat.query_ms_mean = 2;
  lat.query_ms_median = 3;
  lat.query_ms_p95 = 4;
  lat.threads = 2;
  r.latency = lat;
  std::ostringstream text, csv;
  write_report_text(text, r);
  write_report_csv(csv, r);
  EXPECT_EQ(text.str(),
            "queries 3\ntop1_agreement 0.5\nrecall_within_R 1\nindex_seconds 1.25\nquery_ms_mean 2\n"
            "query_ms_median 3\nquery_ms_p95 4\nthreads 2\n");
  EXPECT_EQ(csv.str(),
            "queries,top1_agreement,topk_overlap,recall_within_R,precision_within_cR,mean_ewb_translation_error,"
            "mean_ewb_rotation_deg,index_seconds,query_ms_mean,query_ms_median,query_ms_p95,threads\n"
            "3,0.5,,1,,,,1.25,2,3,4,2\n");
  r.precision_within_cR = 1.5;
  EXPECT_THROW(write_report_text(text, r), std::logic_error);
}

}  // namespace
}  // namespace cann
