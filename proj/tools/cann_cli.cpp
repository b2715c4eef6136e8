// Command-line front end: index / rank / eval / bench.
//
//   cann index <descriptors> <index-out>
//   cann rank  <index|descriptors> <images.tsv> <queries> <queries.tsv> <rankings-out>
//   cann eval  <descriptors> <images.tsv> <queries> <queries.tsv> <report-out> [poses]
//   cann bench <descriptors> <images.tsv> <queries> <queries.tsv> <stats-out> [rankings-out]
//
// Query descriptor files use the color field as the query image id, named by
// <queries.tsv>.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "cann/cann_index.hpp"
#include "cann/eval.hpp"
#include "cann/io.hpp"
#include "cann/retrieval.hpp"
#include "cann/scoring.hpp"

namespace {

using namespace cann;
using io::ColorMap;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string algo = "rg";
  double radius = 0.0;
  double approx = 1.1;
  std::size_t grids = 16;
  double ladder_min = 0.0;
  double p = 0.5;
  double gamma = RsConfig::kDefaultGamma;
  std::size_t top_k = 0;
  std::string fuse_global;
  double alpha = 0.5;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  CLI::Option* radius_opt = nullptr;
  CLI::Option* approx_opt = nullptr;
  CLI::Option* grids_opt = nullptr;
  CLI::Option* ladder_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* fuse_opt = nullptr;
  CLI::Option* p_opt = nullptr;
};

const CLI::Validator kApproxCheck(
    [](std::string& s) -> std::string {
      try {
        if (std::stod(s) > 1.0) return {};
      } catch (const std::exception&) {
      }
      return "c must exceed 1 (got " + s + ")";
    },
    "> 1");

void add_build_options(CLI::App* cmd, Options& o) {
  o.radius_opt = cmd->add_option("--radius", o.radius, "Search radius R")->check(CLI::PositiveNumber);
  o.approx_opt = cmd->add_option("--approx", o.approx, "Approximation factor c")->check(kApproxCheck)
                     ->capture_default_str();
  o.grids_opt = cmd->add_option("--grids", o.grids, "Random grids per replica (L)")->check(CLI::PositiveNumber)
                    ->capture_default_str();
  o.ladder_opt = cmd->add_option("--ladder-min", o.ladder_min, "Smallest ladder radius r (default R/16)")
                     ->check(CLI::PositiveNumber);
  o.gamma_opt = cmd->add_option("--gamma", o.gamma, "Failure probability; ln(1/gamma) replicas")
                    ->check(CLI::Range(0.0, 1.0));
  o.seed_opt = cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_algo_option(CLI::App* cmd, Options& o, bool allow_oracle) {
  std::vector<std::string> algos{"rg", "rs"};
  if (allow_oracle) algos.push_back("oracle");
  cmd->add_option("--algo", o.algo, "Search algorithm")->check(CLI::IsMember(algos))->capture_default_str();
}

void add_rank_options(CLI::App* cmd, Options& o) {
  o.p_opt = cmd->add_option("--p", o.p, "Score shape parameter p")
                ->check(CLI::Range(ScoreParams::kMinP, ScoreParams::kMaxP))->capture_default_str();
  cmd->add_option("--top-k", o.top_k, "Keep the k best images per query")->check(CLI::PositiveNumber);
  o.fuse_opt = cmd->add_option("--fuse-global", o.fuse_global, "Global scores: query<TAB>image<TAB>score")
                   ->check(CLI::ExistingFile);
  o.alpha_opt = cmd->add_option("--alpha", o.alpha, "Weight of the global score when fusing")
                    ->check(CLI::Range(0.0, 1.0));
}

void check_combinations(const Options& o, bool has_index_file) {
  if (o.alpha_opt && o.alpha_opt->count() > 0 && o.fuse_global.empty()) {
    throw UsageError("--alpha requires --fuse-global");
  }
  if (o.ladder_opt->count() > 0 && o.algo != "rg") throw UsageError("--ladder-min only applies to --algo rg");
  if (o.algo == "oracle") {
    for (const auto* opt : {o.approx_opt, o.grids_opt, o.ladder_opt, o.gamma_opt, o.seed_opt}) {
      if (opt->count() > 0) throw UsageError(opt->get_name() + " does not apply to --algo oracle");
    }
  }
  if (has_index_file) {
    for (const auto* opt : {o.radius_opt, o.approx_opt, o.grids_opt, o.ladder_opt, o.gamma_opt, o.seed_opt}) {
      if (opt->count() > 0) throw UsageError(opt->get_name() + " is fixed by the stored index");
    }
  } else if (o.radius_opt->count() == 0) {
    throw UsageError("--radius is required");
  }
  if (o.ladder_opt->count() > 0 && o.ladder_min > o.radius) throw UsageError("--ladder-min exceeds --radius");
}

using AnyIndex = std::variant<BruteForceIndex, RsIndex, LadderIndex>;

double index_radius(const AnyIndex& index) {
  return std::visit(
      [](const auto& ix) -> double {
        using T = std::decay_t<decltype(ix)>;
        if constexpr (std::is_same_v<T, BruteForceIndex>) return ix.radius();
        else if constexpr (std::is_same_v<T, RsIndex>) return ix.config().radius;
        else return ix.config().max_radius;
      },
      index);
}

AnyIndex build_index(const PointSet& db, const Options& o) {
  if (o.algo == "oracle") return BruteForceIndex(db, o.radius);
  if (o.algo == "rs") {
    RsConfig cfg;
    cfg.radius = o.radius;
    cfg.approx = o.approx;
    cfg.grids = o.grids;
    cfg.gamma = o.gamma;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    return RsIndex::build(db, cfg);
  }
  LadderConfig cfg = LadderConfig::with_defaults(o.radius);
  if (o.ladder_min > 0.0) cfg.min_radius = o.ladder_min;
  cfg.approx = o.approx;
  cfg.grids = o.grids;
  cfg.gamma = o.gamma;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.color_width = db.color_count() > max_color(ColorWidth::k16) + 1 ? ColorWidth::k32 : ColorWidth::k16;
  return LadderIndex::build(db, cfg);
}

struct QueryInput {
  std::vector<PointSet> images;
  ColorMap names;
};

QueryInput load_queries(const std::string& path, const std::string& names_path, std::size_t dim) {
  QueryInput in;
  in.names = io::read_color_map(names_path);
  const PointSet features = io::read_descriptors(path);
  if (!features.empty() && features.dim() != dim) throw DimensionMismatch(dim, features.dim());
  in.images = split_by_color(features, in.names.size());
  return in;
}

Ranking rank_one(const AnyIndex& index, const PointSet& features, const std::string& name, const Options& o,
                 const io::GlobalScores* global) {
  const ScoreParams params(o.p, index_radius(index));
  Ranking ranking = std::visit(
      [&](const auto& ix) { return rank_images(multi_query(ix, features, o.threads), params, name); }, index);
  if (global) {
    FusionWeights w;
    w.alpha = o.alpha;
    const auto it = global->find(name);
    ranking = fuse_scores(ranking, it == global->end() ? std::unordered_map<Color, double>{} : it->second, w);
  }
  if (o.top_k > 0) ranking = top_k(ranking, o.top_k);
  return ranking;
}

std::vector<Ranking> rank_all(const AnyIndex& index, const QueryInput& queries, const Options& o,
                              const ColorMap& images) {
  std::optional<io::GlobalScores> global;
  if (!o.fuse_global.empty()) global = io::read_global_scores(o.fuse_global, images);
  std::vector<Ranking> out;
  out.reserve(queries.images.size());
  for (std::size_t i = 0; i < queries.images.size(); ++i) {
    out.push_back(rank_one(index, queries.images[i], queries.names.name(static_cast<Color>(i)), o,
                           global ? &*global : nullptr));
  }
  return out;
}

bool is_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[7] = {};
  in.read(magic, 7);
  return in.gcount() == 7 && std::string(magic, 7) == "CANNIDX";
}

int cmd_index(const std::string& db_path, const std::string& out_path, const Options& o) {
  if (o.algo == "oracle") throw UsageError("--algo oracle has no index; use rank --algo oracle");
  check_combinations(o, false);
  const PointSet db = io::read_descriptors(db_path);
  const AnyIndex index = build_index(db, o);
  if (const auto* rs = std::get_if<RsIndex>(&index)) io::save_index(std::filesystem::path(out_path), *rs);
  else io::save_index(std::filesystem::path(out_path), std::get<LadderIndex>(index));
  std::cerr << "indexed " << db.size() << " descriptors into " << out_path << '\n';
  return 0;
}

int cmd_rank(const std::vector<std::string>& files, const Options& o) {
  const bool stored = is_index_file(files[0]);
  if (stored && o.algo == "oracle") throw UsageError("--algo oracle needs a descriptor file, not an index");
  check_combinations(o, stored);
  const ColorMap images = io::read_color_map(files[1]);
  AnyIndex index = [&]() -> AnyIndex {
    if (!stored) return build_index(io::read_descriptors(files[0]), o);
    if (o.algo == "rs") return io::load_rs_index(std::filesystem::path(files[0]));
    return io::load_ladder_index(std::filesystem::path(files[0]));
  }();
  const std::size_t dim = std::visit([](const auto& ix) { return ix.dim(); }, index);
  const QueryInput queries = load_queries(files[2], files[3], dim);
  io::write_rankings(std::filesystem::path(files[4]), rank_all(index, queries, o, images), images);
  return 0;
}

int cmd_eval(const std::vector<std::string>& files, const Options& o) {
  if (o.algo == "oracle") throw UsageError("eval compares --algo rg or rs against the oracle");
  check_combinations(o, false);
  const PointSet db = io::read_descriptors(files[0]);
  const ColorMap images = io::read_color_map(files[1]);
  const QueryInput queries = load_queries(files[2], files[3], db.dim());
  const AnyIndex index = build_index(db, o);
  Options oracle_opts = o;
  oracle_opts.algo = "oracle";
  const AnyIndex oracle = BruteForceIndex(db, o.radius);

  const auto got = rank_all(index, queries, o, images);
  const auto want = rank_all(oracle, queries, oracle_opts, images);
  const std::size_t k = o.top_k > 0 ? o.top_k : 5;
  const OracleAgreement agree = compare_to_oracle(got, want, k);

  PointSet all_features(db.dim());
  for (const auto& img : queries.images) {
    for (std::size_t i = 0; i < img.size(); ++i) all_features.add(img.point(i), img.color(i));
  }
  const ColorReporter reporter = [&](std::span<const float> q) {
    const QueryOutcome out = std::visit([&](const auto& ix) { return ix.query(q); }, index);
    std::vector<Color> colors;
    for (const auto& e : out) colors.push_back(e.color);
    return colors;
  };
  const ReportingQuality quality = colored_reporting_quality(reporter, db, all_features, o.radius, o.approx);

  EvalReport report;
  report.queries = got.size();
  report.top1_agreement = agree.top1;
  report.topk_overlap = agree.topk_overlap;
  report.recall_within_R = quality.recall;
  report.precision_within_cR = quality.precision;
  if (files.size() > 5) {
    const auto poses = io::read_poses(files[5]);
    double t_sum = 0.0;
    double r_sum = 0.0;
    std::size_t counted = 0;
    for (const auto& ranking : got) {
      const auto truth = poses.find(ranking.query_id);
      if (truth == poses.end() || ranking.entries.empty()) continue;
      std::vector<Pose> top;
      for (std::size_t i = 0; i < std::min(k, ranking.entries.size()); ++i) {
        const auto it = poses.find(images.name(ranking.entries[i].color));
        if (it != poses.end()) top.push_back(it->second);
      }
      if (top.empty()) continue;
      const EwbError e = ewb_error(top, truth->second);
      t_sum += e.translation;
      r_sum += e.rotation_deg;
      ++counted;
    }
    if (counted > 0) {
      report.mean_ewb_translation_error = t_sum / static_cast<double>(counted);
      report.mean_ewb_rotation_deg = r_sum / static_cast<double>(counted);
    }
  }
  std::ofstream text(files[4]);
  write_report_text(text, report);
  std::ofstream csv(files[4] + ".csv");
  write_report_csv(csv, report);
  if (!text || !csv) throw io::FormatError(io::FormatErrc::kIo, "cannot write report");
  return 0;
}

int cmd_bench(const std::vector<std::string>& files, const Options& o) {
  check_combinations(o, false);
  const PointSet db = io::read_descriptors(files[0]);
  const ColorMap images = io::read_color_map(files[1]);
  const QueryInput queries = load_queries(files[2], files[3], db.dim());
  std::vector<Ranking> rankings(queries.images.size());
  LatencyStats stats = bench([&] { return build_index(db, o); },
                             [&](const AnyIndex& index, std::size_t i) {
                               rankings[i] = rank_one(index, queries.images[i],
                                                      queries.names.name(static_cast<Color>(i)), o, nullptr);
                             },
                             queries.images.size(), 1);
  stats.threads = o.threads;
  EvalReport report;
  report.queries = queries.images.size();
  report.latency = stats;
  std::ofstream text(files[4]);
  write_report_text(text, report);
  if (!text) throw io::FormatError(io::FormatErrc::kIo, "cannot write " + files[4]);
  if (files.size() > 5) io::write_rankings(std::filesystem::path(files[5]), rankings, images);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colored approximate nearest neighbor image ranking"};
  app.require_subcommand(1);

  Options index_opts, rank_opts, eval_opts, bench_opts;
  std::string db_path, out_path;
  std::vector<std::string> rank_files, eval_files, bench_files;

  auto* index_cmd = app.add_subcommand("index", "Build and save an RS or RG index");
  index_cmd->add_option("descriptors", db_path, "Database descriptor file")->required()->check(CLI::ExistingFile);
  index_cmd->add_option("output", out_path, "Index file to write")->required();
  add_algo_option(index_cmd, index_opts, false);
  add_build_options(index_cmd, index_opts);

  auto* rank_cmd = app.add_subcommand("rank", "Rank database images for every query image");
  rank_cmd->add_option("files", rank_files, "<index|descriptors> <images.tsv> <queries> <queries.tsv> <out>")
      ->required()->expected(5);
  add_algo_option(rank_cmd, rank_opts, true);
  add_build_options(rank_cmd, rank_opts);
  add_rank_options(rank_cmd, rank_opts);

  auto* eval_cmd = app.add_subcommand("eval", "Compare against the exact oracle and write a report");
  eval_cmd->add_option("files", eval_files, "<descriptors> <images.tsv> <queries> <queries.tsv> <report> [poses]")
      ->required()->expected(5, 6);
  add_algo_option(eval_cmd, eval_opts, false);
  add_build_options(eval_cmd, eval_opts);
  add_rank_options(eval_cmd, eval_opts);

  auto* bench_cmd = app.add_subcommand("bench", "Time index construction and per-image queries");
  bench_cmd->add_option("files", bench_files, "<descriptors> <images.tsv> <queries> <queries.tsv> <stats> [rankings]")
      ->required()->expected(5, 6);
  add_algo_option(bench_cmd, bench_opts, true);
  add_build_options(bench_cmd, bench_opts);
  add_rank_options(bench_cmd, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (index_cmd->parsed()) return cmd_index(db_path, out_path, index_opts);
    if (rank_cmd->parsed()) return cmd_rank(rank_files, rank_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_files, eval_opts);
    if (bench_cmd->parsed()) {
      if (!bench_opts.fuse_global.empty()) throw UsageError("bench does not fuse global scores");
      return cmd_bench(bench_files, bench_opts);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
