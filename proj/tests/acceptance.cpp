// Acceptance suite. Prints one PASS/FAIL line per criterion; with arguments,
// runs only the listed criterion numbers. Exit status is nonzero if any
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <sstream>
#include <string>
#include <vector>

#include "cann/cann_index.hpp"
#include "cann/eval.hpp"
#include "cann/io.hpp"
#include "cann/retrieval.hpp"
#include "cann/scoring.hpp"
#include "cann/synthetic.hpp"

namespace {

using namespace cann;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Tolerances and limits

constexpr double kClosedFormTol = 1e-12;
constexpr double kBisectionTol = 1e-9;
constexpr double kScoreLimitSec = 1.0;

constexpr double kPrecisionPassRate = 0.999;
constexpr double kPrecisionLimitSec = 60.0;

constexpr double kRecallDefault = 0.9;
constexpr double kRecallAmplified = 0.95;
constexpr double kRecallGamma = 0.05;
constexpr std::size_t kRecallPlants = 1000;
constexpr double kRecallLimitSec = 120.0;

constexpr std::size_t kLadderProbes = 10000;
constexpr double kLadderLimitSec = 120.0;

constexpr double kRsTop1 = 0.95;
constexpr double kRgTop1 = 0.90;
constexpr double kTop5Overlap = 0.8;
constexpr double kRankingLimitSec = 300.0;

constexpr double kSpeedupRequired = 5.0;
constexpr double kBuildDoublingMax = 2.5;
constexpr double kRuntimeLimitSec = 900.0;

constexpr std::size_t kFusionTables = 100;

constexpr double kApprox = 1.1;
constexpr std::size_t kGrids = 16;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

template <typename Index>
Ranking rank_query(const Index& index, const QueryImage& query, const ScoreParams& params) {
  return rank_images(multi_query(index, query.features), params, query.name);
}

template <typename Index>
std::vector<Ranking> rank_all(const Index& index, const std::vector<QueryImage>& queries, const ScoreParams& params) {
  std::vector<Ranking> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(rank_query(index, q, params));
  return out;
}

// Unit vector drawn uniformly from the column space of `basis`.
Eigen::VectorXd subspace_direction(const Eigen::MatrixXd& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::VectorXd c(basis.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = n01(rng);
  return basis * c.normalized();
}

std::vector<float> to_floats(const Eigen::VectorXd& v) {
  std::vector<float> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v(i));
  return out;
}

// ---------------------------------------------------------------------------
// Instances shared with the determinism criterion

struct RecallInstance {
  PointSet database;
  PointSet queries;
  std::vector<double> plant_distance;
  double radius = 1.0;
};

// Well separated anchors in a d_eff = 8 subspace of R^32; plant i sits at a
// distance drawn uniformly from (0, radius] from anchor i, in a uniformly
// random subspace direction.
RecallInstance make_recall_instance(std::uint64_t seed) {
  constexpr std::size_t kDim = 32;
  constexpr std::size_t kEff = 8;
  RecallInstance inst;
  const Eigen::MatrixXd basis = random_basis(kDim, kEff, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  inst.database = PointSet(kDim);
  inst.queries = PointSet(kDim);
  for (std::size_t i = 0; i < kRecallPlants; ++i) {
    Eigen::VectorXd coeff(kEff);
    std::size_t k = i;
    for (Eigen::Index j = 0; j < coeff.size(); ++j) {
      coeff(j) = 8.0 * static_cast<double>(k % 4);
      k /= 4;
    }
    const Eigen::VectorXd anchor = basis * coeff;
    const double t = inst.radius * (1.0 - unit(rng));  // (0, radius]
    const Eigen::VectorXd plant = anchor + t * subspace_direction(basis, rng);
    inst.database.add(to_floats(anchor), static_cast<Color>(i));
    const auto q = to_floats(plant);
    inst.queries.add(q, static_cast<Color>(i));
    inst.plant_distance.push_back(distance(inst.database.point(i), q));
  }
  return inst;
}

struct RetrievalInstance {
  PointSet database;
  SyntheticQueries queries;
  double radius = 0.6;
  double p = 0.5;
};

// Overlapping views of shared landmarks: each query image has strong matches
// in its target and, with decreasing overlap, in the images next to it.
RetrievalInstance make_retrieval_instance(std::size_t images, std::size_t features, std::size_t stride,
                                          std::size_t query_images, std::uint64_t seed) {
  TrackConfig cfg;
  cfg.images = images;
  cfg.features_per_image = features;
  cfg.stride = stride;
  cfg.dim = 32;
  cfg.intrinsic_dim = 8;
  cfg.landmark_spread = 1.0;
  cfg.observation_noise = 0.01;
  cfg.seed = seed;
  const TrackDataset data = make_track_dataset(cfg);
  RetrievalInstance inst;
  inst.database = data.database;
  inst.queries = make_track_queries(data, query_images, seed + 1);
  return inst;
}

RetrievalInstance make_ranking_instance() { return make_retrieval_instance(200, 200, 20, 100, 51); }

struct LadderInstance {
  SyntheticDataset data;
  PointSet queries;
};

LadderInstance make_ladder_instance(std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.images = 200;
  cfg.features_per_image = 50;
  cfg.dim = 32;
  cfg.intrinsic_dim = 8;
  cfg.cluster_spread = 0.3;
  cfg.seed = seed;
  LadderInstance inst;
  inst.data = make_clustered_dataset(cfg);
  const auto qs = make_queries(inst.data, kLadderProbes, 1, 0.1, seed + 1);
  inst.queries = PointSet(cfg.dim);
  for (const auto& q : qs.images) inst.queries.add(q.features.point(0), q.features.color(0));
  return inst;
}

LadderConfig ladder_config(double radius, std::uint64_t seed) {
  LadderConfig cfg = LadderConfig::with_defaults(radius);
  cfg.approx = kApprox;
  cfg.grids = kGrids;
  cfg.seed = seed;
  return cfg;
}

RsConfig rs_config(double radius, std::uint64_t seed) {
  RsConfig cfg;
  cfg.radius = radius;
  cfg.approx = kApprox;
  cfg.grids = kGrids;
  cfg.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Score correctness

Outcome score_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_closed = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double radius = 0.1 + 10.0 * unit(rng);
    const double d = radius * unit(rng);
    worst_closed = std::max(worst_closed, std::abs(score_term(d, ScoreParams(0.5, radius)) - (1.0 - d / radius)));
  }
  double worst_tail = 0.0;
  for (double p = 0.05; p <= 0.951; p += 0.05) {
    for (double eps : {1e-9, 1e-6, 1e-3, 0.01, 0.1, 0.5, 0.9}) {
      const ScoreParams params(p, 1.0);
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (score_term(mid, params) <= eps ? hi : lo) = mid;
      }
      worst_tail = std::max(worst_tail, std::abs(tail_bound_distance(params, eps) - hi));
    }
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = worst_closed <= kClosedFormTol && worst_tail <= kBisectionTol && secs < kScoreLimitSec;
  out.detail = "max |s - (1 - d/R)| = " + fmt(worst_closed) + " (tol 1e-12), max |tail - bisection| = " +
               fmt(worst_tail) + " (tol 1e-9), " + fmt(secs, 3) + " s (limit 1 s)";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Precision guarantee

Outcome precision_guarantee() {
  const auto t0 = Clock::now();
  const std::size_t dims[] = {8, 32, 128};
  const std::size_t sizes[] = {500, 1000, 2500, 5000, 10000};
  std::size_t reported = 0;
  std::size_t witnessed = 0;
  for (std::size_t inst = 0; inst < 50; ++inst) {
    const std::size_t dim = dims[inst % 3];
    const std::size_t n = sizes[inst % 5];
    SyntheticConfig cfg;
    cfg.images = std::max<std::size_t>(n / 50, 1);
    cfg.features_per_image = 50;
    cfg.dim = dim;
    cfg.intrinsic_dim = std::min<std::size_t>(8, dim);
    cfg.cluster_spread = 0.2;
    cfg.seed = 1000 + inst;
    const auto data = make_clustered_dataset(cfg);
    const double radius = 0.5;
    const auto index = GridIndex::build(data.database, radius, kApprox, kGrids, 2000 + inst);
    const auto queries = make_queries(data, 100, 1, 0.05, 3000 + inst);
    PointSet qs(dim);
    for (const auto& q : queries.images) qs.add(q.features.point(0), 0);
    const auto quality = colored_reporting_quality(index, data.database, qs);
    reported += quality.reported;
    witnessed += quality.witnessed;
  }
  const double rate = reported ? static_cast<double>(witnessed) / static_cast<double>(reported) : 0.0;
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = reported > 0 && rate >= kPrecisionPassRate && secs < kPrecisionLimitSec;
  out.detail = std::to_string(witnessed) + "/" + std::to_string(reported) + " reported colors witnessed within cR, rate " +
               fmt(rate, 6) + " (need >= 0.999), " + fmt(secs, 3) + " s (limit 60 s)";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Recall guarantee

struct RecallMeasure {
  double recall = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> bands;  // (hits, total) per tenth of the radius
};

RecallMeasure measure_recall(const RecallInstance& inst, const GridIndex& index) {
  RecallMeasure m;
  m.bands.assign(10, {0, 0});
  std::size_t hits = 0;
  for (std::size_t i = 0; i < inst.queries.size(); ++i) {
    const auto colors = index.query_colors(inst.queries.point(i));
    const bool hit = std::binary_search(colors.begin(), colors.end(), inst.queries.color(i));
    hits += hit;
    const auto band = std::min<std::size_t>(9, static_cast<std::size_t>(10.0 * inst.plant_distance[i] / inst.radius));
    m.bands[band].first += hit;
    ++m.bands[band].second;
  }
  m.recall = static_cast<double>(hits) / static_cast<double>(inst.queries.size());
  return m;
}

std::string band_summary(const RecallMeasure& m) {
  std::string s;
  for (std::size_t b = 0; b < m.bands.size(); ++b) {
    const auto [h, t] = m.bands[b];
    s += (b ? " " : "") + fmt(0.1 * static_cast<double>(b), 2) + "-" + fmt(0.1 * static_cast<double>(b + 1), 2) + ":" +
         (t ? fmt(static_cast<double>(h) / static_cast<double>(t), 3) : std::string("-"));
  }
  return s;
}

Outcome recall_guarantee() {
  const auto t0 = Clock::now();
  const RecallInstance inst = make_recall_instance(31);
  const auto plain = GridIndex::build(inst.database, inst.radius, kApprox, kGrids, 32);
  const auto amplified =
      GridIndex::build(inst.database, inst.radius, kApprox, kGrids * replication_for(kRecallGamma), 33);
  const RecallMeasure a = measure_recall(inst, plain);
  const RecallMeasure b = measure_recall(inst, amplified);
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = a.recall >= kRecallDefault && b.recall >= kRecallAmplified && secs < kRecallLimitSec;
  out.detail = "recall L=16: " + fmt(a.recall) + " (need >= 0.9), L=16 x " +
               std::to_string(replication_for(kRecallGamma)) + " (gamma 0.05): " + fmt(b.recall) +
               " (need >= 0.95), " + std::to_string(inst.queries.size()) + " plants, " + fmt(secs, 3) +
               " s (limit 120 s)";
  out.notes.push_back("recall by plant distance / radius, L=16: " + band_summary(a));
  out.notes.push_back("recall by plant distance / radius, L=48: " + band_summary(b));
  return out;
}

// ---------------------------------------------------------------------------
// 4. Ladder soundness

Outcome ladder_soundness() {
  const auto t0 = Clock::now();
  const LadderInstance inst = make_ladder_instance(41);
  const auto index = LadderIndex::build(inst.data.database, ladder_config(2.0, 42));
  std::size_t checked = 0;
  std::size_t violations = 0;
  const BruteForceIndex exact(inst.data.database, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < inst.queries.size(); ++i) {
    const auto q = inst.queries.point(i);
    const QueryOutcome got = index.query(q);
    if (got.empty()) continue;
    const QueryOutcome truth = exact.query(q);
    for (const auto& e : got) {
      ++checked;
      if (!(*truth.find(e.color) <= kApprox * e.distance)) ++violations;
    }
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = violations == 0 && checked > 0 && secs < kLadderLimitSec;
  out.detail = std::to_string(violations) + " violations of d(q, color) <= c * bucket over " + std::to_string(checked) +
               " reported colors from " + std::to_string(inst.queries.size()) + " probes, " + fmt(secs, 3) +
               " s (limit 120 s)";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Oracle ranking agreement

Outcome ranking_agreement() {
  const auto t0 = Clock::now();
  const RetrievalInstance inst = make_ranking_instance();
  const ScoreParams params(inst.p, inst.radius);
  const auto oracle = rank_all(BruteForceIndex(inst.database, inst.radius), inst.queries.images, params);
  const auto rs = rank_all(RsIndex::build(inst.database, rs_config(inst.radius, 52)), inst.queries.images, params);
  const auto rg =
      rank_all(LadderIndex::build(inst.database, ladder_config(inst.radius, 53)), inst.queries.images, params);
  const auto a = compare_to_oracle(rs, oracle, 5);
  const auto b = compare_to_oracle(rg, oracle, 5);
  const double secs = seconds_since(t0);
  std::size_t oracle_len = 0;
  for (const auto& r : oracle) oracle_len += r.entries.size();
  Outcome out;
  out.pass = a.top1 >= kRsTop1 && b.top1 >= kRgTop1 && a.topk_overlap >= kTop5Overlap &&
             b.topk_overlap >= kTop5Overlap && secs < kRankingLimitSec;
  out.detail = "RS top-1 " + fmt(a.top1) + " (need >= 0.95), RG top-1 " + fmt(b.top1) + " (need >= 0.9), top-5 overlap RS " +
               fmt(a.topk_overlap) + " / RG " + fmt(b.topk_overlap) + " (need >= 0.8), " + fmt(secs, 3) +
               " s (limit 300 s)";
  out.notes.push_back("mean oracle ranking length " +
                      fmt(static_cast<double>(oracle_len) / static_cast<double>(oracle.size())) + " images");
  return out;
}

// ---------------------------------------------------------------------------
// 6. Runtime direction

struct Timing {
  double build_half = 0.0;
  double build_full = 0.0;
  LatencyStats query;
};

template <typename Build, typename Index>
Timing time_method(const RetrievalInstance& half, const RetrievalInstance& full, Build build,
                   const ScoreParams& params) {
  Timing t;
  {
    const auto t0 = Clock::now();
    const Index index = build(half.database);
    t.build_half = seconds_since(t0);
  }
  t.query = bench([&] { return build(full.database); },
                  [&](const Index& index, std::size_t i) { (void)rank_query(index, full.queries.images[i], params); },
                  full.queries.images.size(), 1);
  t.build_full = t.query.index_seconds;
  return t;
}

constexpr std::size_t kBenchQueryImages = 10;

constexpr double kRuntimeClusterSpread = 0.003;

// Places seen by 10 images each: the cells around a query hold thousands of
// points but only about ten colors.
RetrievalInstance make_runtime_instance(std::size_t images) {
  SyntheticConfig cfg;
  cfg.images = images;
  cfg.features_per_image = 1000;
  cfg.dim = 32;
  cfg.intrinsic_dim = 8;
  cfg.center_spread = 1.0;
  cfg.cluster_spread = kRuntimeClusterSpread;
  cfg.group_size = 10;
  cfg.group_spread = kRuntimeClusterSpread;
  cfg.seed = 61;
  const SyntheticDataset data = make_clustered_dataset(cfg);
  RetrievalInstance inst;
  inst.database = data.database;
  inst.queries = make_queries(data, kBenchQueryImages, 1000, kRuntimeClusterSpread, 62);
  return inst;
}

Outcome runtime_direction() {
  const auto t0 = Clock::now();
  Outcome out;
  Timing rg, rs;
  {
    const RetrievalInstance half = make_runtime_instance(500);
    const RetrievalInstance full = make_runtime_instance(1000);
    const ScoreParams params(full.p, full.radius);
    rs = time_method<std::function<RsIndex(const PointSet&)>, RsIndex>(
        half, full, [&](const PointSet& pts) { return RsIndex::build(pts, rs_config(full.radius, 62)); }, params);
    rg = time_method<std::function<LadderIndex(const PointSet&)>, LadderIndex>(
        half, full, [&](const PointSet& pts) { return LadderIndex::build(pts, ladder_config(full.radius, 63)); },
        params);
  }
  const double speedup = rs.query.query_ms_mean / rg.query.query_ms_mean;
  const double rg_growth = rg.build_full / rg.build_half;
  const double rs_growth = rs.build_full / rs.build_half;
  const double secs = seconds_since(t0);
  out.pass = speedup >= kSpeedupRequired && rg_growth <= kBuildDoublingMax && rs_growth <= kBuildDoublingMax &&
             secs < kRuntimeLimitSec;
  out.detail = "per-image query RS " + fmt(rs.query.query_ms_mean) + " ms vs RG " + fmt(rg.query.query_ms_mean) +
               " ms, speedup " + fmt(speedup, 3) + "x (need >= 5); build growth n=5e5 -> 1e6: RG " +
               fmt(rg_growth, 3) + "x, RS " + fmt(rs_growth, 3) + "x (need <= 2.5); " + fmt(secs, 4) +
               " s (limit 900 s)";
  out.notes.push_back("build seconds RG " + fmt(rg.build_half) + " / " + fmt(rg.build_full) + ", RS " +
                      fmt(rs.build_half) + " / " + fmt(rs.build_full) + "; median query ms RG " +
                      fmt(rg.query.query_ms_median) + ", RS " + fmt(rs.query.query_ms_median) + "; 1 thread");
  return out;
}

// ---------------------------------------------------------------------------
// 7. Determinism and persistence

template <typename Index, typename Build, typename Load>
bool stable(const std::string& label, Build build, Load load, const std::function<std::vector<Ranking>(const Index&)>& run,
            std::vector<std::string>& notes) {
  const auto dir = std::filesystem::temp_directory_path() / "cann_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = dir / (label + ".idx");
  std::vector<Ranking> first;
  {
    const Index index = build();
    first = run(index);
    io::save_index(path, index);
  }
  bool same_build = false;
  {
    const Index again = build();
    same_build = run(again) == first;
  }
  bool same_load = false;
  {
    const Index loaded = load(path);
    same_load = run(loaded) == first;
  }
  std::filesystem::remove(path);
  notes.push_back(label + ": rebuild " + (same_build ? "identical" : "DIFFERENT") + ", save/load " +
                  (same_load ? "identical" : "DIFFERENT"));
  return same_build && same_load;
}

// Each reported color with its distance, as a one-feature ranking, so that
// pure reporting instances can be compared the same way as rankings.
std::vector<Ranking> outcomes_as_rankings(const std::vector<QueryOutcome>& outcomes) {
  std::vector<Ranking> out;
  for (const auto& o : outcomes) {
    Ranking r{"", {}};
    for (const auto& e : o) r.entries.push_back({e.color, e.distance});
    out.push_back(std::move(r));
  }
  return out;
}

Outcome determinism_and_persistence() {
  const auto t0 = Clock::now();
  std::vector<std::string> notes;
  bool ok = true;
  auto load_rg = [](const std::filesystem::path& p) { return io::load_ladder_index(p); };
  auto load_rs = [](const std::filesystem::path& p) { return io::load_rs_index(p); };

  {
    const RecallInstance inst = make_recall_instance(31);
    std::function<std::vector<Ranking>(const RsIndex&)> run = [&](const RsIndex& ix) {
      return outcomes_as_rankings(multi_query(ix, inst.queries));
    };
    RsConfig cfg = rs_config(inst.radius, 32);
    cfg.gamma = kRecallGamma;
    ok &= stable<RsIndex>("recall-instance RS", [&] { return RsIndex::build(inst.database, cfg); }, load_rs, run, notes);
  }
  {
    const LadderInstance inst = make_ladder_instance(41);
    std::function<std::vector<Ranking>(const LadderIndex&)> run = [&](const LadderIndex& ix) {
      return outcomes_as_rankings(multi_query(ix, inst.queries));
    };
    ok &= stable<LadderIndex>("ladder-instance RG", [&] { return LadderIndex::build(inst.data.database, ladder_config(2.0, 42)); },
                              load_rg, run, notes);
  }
  for (const bool big : {false, true}) {
    const RetrievalInstance inst = big ? make_runtime_instance(1000) : make_ranking_instance();
    const std::string tag = big ? "runtime-instance" : "ranking-instance";
    const ScoreParams params(inst.p, inst.radius);
    std::function<std::vector<Ranking>(const RsIndex&)> run_rs = [&](const RsIndex& ix) {
      return rank_all(ix, inst.queries.images, params);
    };
    std::function<std::vector<Ranking>(const LadderIndex&)> run_rg = [&](const LadderIndex& ix) {
      return rank_all(ix, inst.queries.images, params);
    };
    ok &= stable<RsIndex>(tag + " RS", [&] { return RsIndex::build(inst.database, rs_config(inst.radius, 52)); },
                          load_rs, run_rs, notes);
    ok &= stable<LadderIndex>(tag + " RG",
                              [&] { return LadderIndex::build(inst.database, ladder_config(inst.radius, 53)); },
                              load_rg, run_rg, notes);
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = ok;
  out.detail = std::string(ok ? "all" : "not all") + " rankings bit-identical across rebuilds and save/load round trips (" +
               std::to_string(notes.size()) + " index configurations), " + fmt(secs, 4) + " s";
  out.notes = notes;
  return out;
}

// ---------------------------------------------------------------------------
// 8. Fusion sanity

// Order of `ranking` restricted to the colors of `source`.
std::vector<Color> restricted_order(const Ranking& ranking, const std::unordered_map<Color, double>& source) {
  std::vector<Color> out;
  for (const auto& e : ranking.entries) {
    if (source.contains(e.color)) out.push_back(e.color);
  }
  return out;
}

Outcome fusion_sanity() {
  std::mt19937_64 rng(81);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < kFusionTables; ++t) {
    std::uniform_int_distribution<int> size(1, 60);
    std::uniform_int_distribution<Color> color(0, 80);
    // Coarse values so that ties occur regularly.
    std::uniform_int_distribution<int> level(0, 12);
    std::unordered_map<Color, double> cann_scores, global;
    for (int i = size(rng); i > 0; --i) cann_scores[color(rng)] = 0.5 * level(rng);
    for (int i = size(rng); i > 0; --i) global[color(rng)] = 0.25 * level(rng) - 1.0;
    const Ranking cann = ranking_from_scores(cann_scores);
    const Ranking global_only = ranking_from_scores(global);

    FusionWeights w;
    w.alpha = 0.0;
    if (restricted_order(fuse_scores(cann, global, w), cann_scores) != cann.colors()) ++failures;
    w.alpha = 1.0;
    if (restricted_order(fuse_scores(cann, global, w), global) != global_only.colors()) ++failures;
  }
  Outcome out;
  out.pass = failures == 0;
  out.detail = std::to_string(failures) + " ordering mismatches over " + std::to_string(kFusionTables) +
               " random score tables x alpha in {0, 1}";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"score correctness", score_correctness},
      {"precision guarantee", precision_guarantee},
      {"recall guarantee", recall_guarantee},
      {"ladder soundness", ladder_soundness},
      {"oracle ranking agreement", ranking_agreement},
      {"runtime direction", runtime_direction},
      {"determinism and persistence", determinism_and_persistence},
      {"fusion sanity", fusion_sanity},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::stoul(argv[i])));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.contains(i + 1)) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    all &= out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << out.detail
              << std::endl;
    for (const auto& note : out.notes) std::cout << "        " << note << std::endl;
  }
  return all ? 0 : 1;
}
