// catarray: simulate LiDAR frames of a power-line array, estimate the array
// pose and sag frame by frame, run outlier sensitivity studies, filter clouds
// and export fitted curves.

#include "json_config.hpp"

#include "catarray/config.hpp"
#include "catarray/filters.hpp"
#include "catarray/geometry.hpp"
#include "catarray/io.hpp"
#include "catarray/loss.hpp"
#include "catarray/metrics.hpp"
#include "catarray/simulator.hpp"
#include "catarray/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace catarray;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Point3 to_point(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw ArgumentError(std::string(what) + " needs exactly 3 values x,y,z");
  return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------
// Option groups shared between subcommands

struct SolverOptions {
  std::string config = "222";
  int n_search = 2;
  int max_iterations = 200;
  std::vector<double> q;
  std::vector<double> sigma;
  std::string log_base = "10";

  void add(CLI::App* app) {
    app->add_option("--config", config, "Conductor configuration: 1, 32 or 222")
        ->capture_default_str();
    app->add_option("--n-search", n_search, "Perturbed restarts per frame")->capture_default_str();
    app->add_option("--max-iter", max_iterations, "Solver iteration cap")->capture_default_str();
    app->add_option("--q", q, "Regularization diagonal, 5+l values")->delimiter(',');
    app->add_option("--sigma", sigma, "Restart perturbation std-dev, 5+l values")->delimiter(',');
    app->add_option("--log-base", log_base, "Point cost logarithm: 10 or e")
        ->check(CLI::IsMember({"10", "e"}))
        ->capture_default_str();
  }

  EstimatorSettings settings(const ConductorConfig& cfg) const {
    EstimatorSettings s = default_settings(cfg);
    s.n_search = n_search;
    s.max_iterations = max_iterations;
    if (!q.empty()) s.weights.q_diagonal = to_vector(q);
    if (!sigma.empty()) s.sigma = to_vector(sigma);
    s.weights.base = log_base == "e" ? CostBase::kNatural : CostBase::kLog10;
    s.check(cfg);
    return s;
  }
};

struct FilterOptions {
  std::vector<double> anchor_a;
  std::vector<double> anchor_b;
  CorridorSpec corridor;
  RansacSpec ransac;
  ClusterSpec cluster;

  void add(CLI::App* app) {
    app->add_option("--anchor-a", anchor_a, "Corridor anchor x,y,z")->delimiter(',');
    app->add_option("--anchor-b", anchor_b, "Corridor anchor x,y,z")->delimiter(',');
    app->add_option("--half-width", corridor.half_width, "Corridor half-width [m]")
        ->capture_default_str();
    app->add_option("--bin-size", corridor.bin_size, "Elevation histogram bin [m]")
        ->capture_default_str();
    app->add_option("--ground-fraction", corridor.ground_fraction,
                    "Bin occupancy that marks ground")
        ->capture_default_str();
    app->add_option("--ransac-iterations", ransac.iterations)->capture_default_str();
    app->add_option("--ransac-threshold", ransac.threshold, "Plane inlier distance [m]")
        ->capture_default_str();
    app->add_option("--eps", cluster.epsilon, "DBSCAN radius [m]")->capture_default_str();
    app->add_option("--min-points", cluster.min_points, "DBSCAN core size")->capture_default_str();
    app->add_option("--linearity", cluster.linearity_ratio, "Minimum lambda1/lambda2 of a line")
        ->capture_default_str();
  }

  CorridorSpec corridor_spec() const {
    if (anchor_a.empty() || anchor_b.empty()) {
      throw ArgumentError("corridor filter needs --anchor-a and --anchor-b");
    }
    CorridorSpec c = corridor;
    c.anchor_a = to_point(anchor_a, "--anchor-a");
    c.anchor_b = to_point(anchor_b, "--anchor-b");
    c.check();
    return c;
  }

  FilterResult apply(const std::string& method, const PointCloud& cloud, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    if (method == "none") return detail::identity(cloud);
    if (method == "corridor") return corridor_filter(cloud, corridor_spec());
    if (method == "ground") return ground_filter_ransac(cloud, ransac, rng);
    if (method == "cluster") return clustering_filter(cloud, ransac, cluster, rng);
    throw ArgumentError("unknown filter method '" + method + "'");
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string mode = "global";
  std::string scene = "standard";
  std::string config = "222";
  int outliers = 0;
  int frames = 100;
  std::uint64_t seed = 0;
  std::string out;
  double noise = 0.1;
  int pts_per_line = 10;
  double span = 200.0;
  double slice_center = 30.0;
  double slice_width = 5.0;
  double outlier_extent = 10.0;
  double outlier_lateral = 15.0;
};

int cmd_simulate(const SimulateOptions& o) {
  const ConductorConfig cfg = config_by_name(o.config);
  std::vector<LabeledFrame> frames;
  if (o.scene == "cluttered") {
    ClutterSpec spec = default_clutter(o.seed, o.frames, cfg);
    spec.base.noise_sigma = o.noise;
    frames = generate_cluttered_sequence(spec);
    const auto [a, b] = spec.anchors();
    std::cout << "corridor anchors: " << format_double(a.x()) << ',' << format_double(a.y())
              << ',' << format_double(a.z()) << "  " << format_double(b.x()) << ','
              << format_double(b.y()) << ',' << format_double(b.z()) << '\n';
  } else {
    Scenario s = make_scenario(parse_mode(o.mode), o.outliers, o.frames, o.seed, cfg,
                               o.outlier_extent, o.outlier_lateral);
    s.noise_sigma = o.noise;
    s.pts_per_line_max = o.pts_per_line;
    s.span = o.span;
    s.slice_center = o.slice_center;
    s.slice_width = o.slice_width;
    if (s.mode == ObservationMode::kPartial) {
      s.outlier_box = default_outlier_box(cfg, s.truth, s.slice_center, o.outlier_extent,
                                          o.outlier_lateral);
    }
    frames = generate_sequence(s);
  }
  fs::create_directories(o.out);
  std::size_t n_points = 0;
  std::size_t n_conductor = 0;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    write_frame(frame_path(o.out, t), frames[t].cloud);
    write_labels(labels_path(o.out, t), frames[t].labels);
    n_points += frames[t].cloud.size();
    for (int l : frames[t].labels) n_conductor += l >= 0 ? 1 : 0;
  }
  if (!frames.empty()) write_truth(truth_path(o.out), frames.front().truth);
  std::cout << "wrote " << frames.size() << " frames to " << o.out << ": " << n_points
            << " points, " << n_conductor << " on conductors\n";
  return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  std::string run;
  std::string out;
  std::vector<double> prior;
  bool prior_from_truth = false;
  std::optional<std::uint64_t> perturb_seed;
  std::vector<double> prior_sigma;
  std::uint64_t seed = 0;
  std::string filter = "none";
  bool no_timing = false;
  double threshold = 1.0;
  SolverOptions solver;
  FilterOptions filters;
};

ParamVector initial_prior(const EstimateOptions& o, const std::optional<ParamVector>& truth,
                          const ConductorConfig& cfg, const EstimatorSettings& settings) {
  const int chosen = (o.prior.empty() ? 0 : 1) + (o.prior_from_truth ? 1 : 0) +
                     (o.perturb_seed ? 1 : 0);
  if (chosen != 1) {
    throw ArgumentError("give exactly one of --prior, --prior-from-truth, --perturb-seed");
  }
  if (!o.prior.empty()) {
    ParamVector p(to_vector(o.prior));
    p.check(cfg);
    return p;
  }
  if (!truth) throw ArgumentError("the run directory has no truth.csv to start from");
  if (o.prior_from_truth) return *truth;
  const Eigen::VectorXd sigma =
      o.prior_sigma.empty() ? default_prior_sigma(cfg) : to_vector(o.prior_sigma);
  std::mt19937_64 rng(*o.perturb_seed);
  return random_prior(*truth, sigma, settings.bounds.resolve(*truth), rng);
}

int cmd_estimate(const EstimateOptions& o) {
  const ConductorConfig cfg = config_by_name(o.solver.config);
  const EstimatorSettings base = o.solver.settings(cfg);
  if (o.filter != "none") o.filters.apply(o.filter, PointCloud{}, 0);  // validate flags early

  const auto paths = list_frames(o.run);
  std::optional<ParamVector> truth;
  if (fs::exists(truth_path(o.run))) {
    truth = read_truth(truth_path(o.run));
    if (truth->offset_count() != cfg.offset_count()) {
      throw IoError("truth.csv has " + std::to_string(truth->offset_count()) +
                    " offsets but configuration " + cfg.name() + " expects " +
                    std::to_string(cfg.offset_count()));
    }
  }
  const ParamVector prior0 = initial_prior(o, truth, cfg, base);

  std::vector<PointCloud> raw;
  std::vector<PointCloud> clouds;
  for (std::size_t t = 0; t < paths.size(); ++t) {
    raw.push_back(read_frame(paths[t], t));
    clouds.push_back(o.filters.apply(o.filter, raw.back(), frame_seed(o.seed ^ 0xF117E5ull, t)).cloud);
  }

  EstimatorSettings settings = base;
  settings.seed = o.seed;
  const auto results = track_sequence(clouds, prior0, settings, cfg);

  std::vector<std::string> header{"frame"};
  for (const auto& n : parameter_names(cfg.offset_count())) header.push_back(n);
  for (const char* c : {"cost", "n_pts", "n_raw", "solve_time_ms"}) header.emplace_back(c);
  if (truth) {
    header.emplace_back("accuracy");
    for (const auto& n : parameter_names(cfg.offset_count())) header.push_back(n + "_e");
  }
  std::string csv = join_row(header);
  for (std::size_t t = 0; t < results.size(); ++t) {
    const auto& r = results[t];
    std::vector<std::string> row{std::to_string(t)};
    for (const auto& v : format_values(r.p_hat_new.values())) row.push_back(v);
    row.push_back(format_double(r.cost));
    row.push_back(std::to_string(clouds[t].size()));
    row.push_back(std::to_string(raw[t].size()));
    row.push_back(o.no_timing ? "0" : format_double(1e3 * r.solve_time_s));
    if (truth) {
      const AccuracyResult acc = accuracy(r.p_hat_new, *truth, raw[t], cfg, o.threshold);
      row.push_back(acc.accuracy_pct ? format_double(*acc.accuracy_pct) : "");
      Eigen::VectorXd err = r.p_hat_new.values() - truth->values();
      err[kPsi] = wrap_angle(err[kPsi]);
      for (const auto& v : format_values(err)) row.push_back(v);
    }
    csv += join_row(row);
  }
  const fs::path out = o.out.empty() ? fs::path(o.run) / "results.csv" : fs::path(o.out);
  write_text(out, csv);
  std::cout << "estimated " << results.size() << " frames, results in " << out.string() << '\n';
  if (truth) {
    const AccuracyResult last =
        accuracy(results.back().p_hat_new, *truth, raw.back(), cfg, o.threshold);
    std::cout << "final accuracy: "
              << (last.accuracy_pct ? format_double(*last.accuracy_pct) + " %" : "undefined")
              << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkOptions {
  std::string mode = "global";
  std::vector<int> outliers{10, 50, 150, 300};
  int repeats = 20;
  int frames = 100;
  int window = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string frame_log;
  bool no_timing = false;
  double noise = 0.1;
  double outlier_extent = 10.0;
  double outlier_lateral = 15.0;
  SolverOptions solver;
};

int cmd_benchmark(const BenchmarkOptions& o) {
  const ConductorConfig cfg = config_by_name(o.solver.config);
  StudyTemplate tpl;
  tpl.mode = parse_mode(o.mode);
  tpl.config_name = cfg.name();
  tpl.n_frames = o.frames;
  tpl.window = o.window;
  tpl.noise_sigma = o.noise;
  tpl.outlier_extent = o.outlier_extent;
  tpl.outlier_lateral = o.outlier_lateral;
  tpl.seed = o.seed;
  StudyReport report = sensitivity_study(tpl, o.outliers, o.repeats, o.solver.settings(cfg));
  if (o.no_timing) {
    for (auto& r : report.rows) r.dt_ms = MeanStd{0.0, 0.0, r.dt_ms.count};
    for (auto& f : report.frame_log) f.solve_time_ms = 0.0;
  }
  const std::string csv = study_csv(report.rows);
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_text(o.out, csv);
    std::cout << "wrote " << report.rows.size() << " rows to " << o.out << '\n';
  }
  if (!o.frame_log.empty()) {
    std::string log = "n_o,repeat,frame,n_pts,dt_ms,explained_est,explained_truth,accuracy,psi_e,a_e\n";
    for (const auto& f : report.frame_log) {
      log += join_row({std::to_string(f.n_outliers), std::to_string(f.repeat),
                       std::to_string(f.frame), std::to_string(f.n_pts),
                       format_double(f.solve_time_ms), std::to_string(f.accuracy.explained_est),
                       std::to_string(f.accuracy.explained_truth),
                       f.accuracy.accuracy_pct ? format_double(*f.accuracy.accuracy_pct) : "",
                       format_double(f.errors.psi_error), format_double(f.errors.a_error)});
    }
    write_text(o.frame_log, log);
  }
  for (const auto& r : report.rows) {
    if (r.frames_over_100 > 0) {
      std::cerr << "note: n_o=" << r.n_outliers << ": " << r.frames_over_100
                << " window frames with accuracy above 100 %\n";
    }
  }
  for (const auto& f : report.failures) std::cerr << "run failed: " << f << '\n';
  return report.failures.empty() ? 0 : kExitRuntime;
}

// ---------------------------------------------------------------------------
// filter

struct FilterCmdOptions {
  std::string method;
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
  FilterOptions filters;
};

int cmd_filter(const FilterCmdOptions& o) {
  if (o.method == "corridor") o.filters.corridor_spec();
  std::vector<fs::path> inputs;
  const bool single = fs::is_regular_file(o.in);
  if (single) {
    inputs.push_back(o.in);
  } else {
    inputs = list_frames(o.in);
  }
  fs::create_directories(o.out);
  std::string report = "frame,n_in,n_kept,n_removed\n";
  std::size_t total_in = 0;
  std::size_t total_kept = 0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const PointCloud cloud = read_frame(inputs[t], t);
    const FilterResult r = o.filters.apply(o.method, cloud, frame_seed(o.seed, t));
    const fs::path dst = single ? fs::path(o.out) / inputs[t].filename() : frame_path(o.out, t);
    write_frame(dst, r.cloud);
    if (!single && fs::exists(labels_path(o.in, t))) {
      const auto labels = read_labels(labels_path(o.in, t));
      if (labels.size() != cloud.size()) {
        throw IoError(labels_path(o.in, t).string() + ": row count differs from the frame");
      }
      std::vector<int> kept;
      for (std::size_t i : r.kept) kept.push_back(labels[i]);
      write_labels(labels_path(o.out, t), kept);
    }
    report += join_row({std::to_string(t), std::to_string(cloud.size()),
                        std::to_string(r.cloud.size()),
                        std::to_string(cloud.size() - r.cloud.size())});
    total_in += cloud.size();
    total_kept += r.cloud.size();
  }
  if (!single && fs::exists(truth_path(o.in))) {
    fs::copy_file(truth_path(o.in), truth_path(o.out), fs::copy_options::overwrite_existing);
  }
  write_text(fs::path(o.out) / "filter_report.csv", report);
  std::cout << o.method << ": kept " << total_kept << " of " << total_in << " points ("
            << total_in - total_kept << " removed) over " << inputs.size() << " frames\n";
  return 0;
}

// ---------------------------------------------------------------------------
// export-curves

struct ExportOptions {
  std::string config = "222";
  std::vector<double> p;
  std::string results;
  int row = -1;
  double x_min = -100.0;
  double x_max = 100.0;
  int n = 100;
  std::string out;
};

ParamVector params_from_results(const std::string& path, int row, const ConductorConfig& cfg) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw IoError(path + ": no result rows");
  const auto names = parameter_names(cfg.offset_count());
  const int idx = row < 0 ? static_cast<int>(t.rows.size()) + row : row;
  if (idx < 0 || idx >= static_cast<int>(t.rows.size())) {
    throw ArgumentError("row " + std::to_string(row) + " outside " + path);
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto col = std::find(t.header.begin(), t.header.end(), names[i]);
    if (col == t.header.end()) throw IoError(path + ": missing column " + names[i]);
    v[static_cast<Eigen::Index>(i)] =
        parse_double(t.rows[static_cast<std::size_t>(idx)][static_cast<std::size_t>(col - t.header.begin())]);
  }
  return ParamVector(v);
}

int cmd_export_curves(const ExportOptions& o) {
  const ConductorConfig cfg = config_by_name(o.config);
  if (o.p.empty() == o.results.empty()) throw ArgumentError("give exactly one of --p, --results");
  const ParamVector p = o.p.empty() ? params_from_results(o.results, o.row, cfg)
                                    : ParamVector(to_vector(o.p));
  p.check(cfg);
  const auto curves = sample_curves(p, cfg, o.x_min, o.x_max, o.n);
  if (o.out.empty()) {
    std::cout << curves_csv(curves);
  } else {
    write_curves(o.out, curves);
    std::cout << "wrote " << curves.size() << " curves of " << o.n << " points to " << o.out
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Catenary power-line array estimation from LiDAR point clouds", "catarray"};
  app.config_formatter(std::make_shared<catarray::tools::JsonConfig>());
  app.set_config("--config-file", "", "JSON file with option values; flags win");
  app.set_version_flag("--version", "catarray 0.1.0");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Write synthetic frames, labels and truth");
  simulate->add_option("--mode", sim.mode, "global or partial")
      ->check(CLI::IsMember({"global", "partial"}))
      ->capture_default_str();
  simulate->add_option("--scene", sim.scene, "standard or cluttered (ground + pylon)")
      ->check(CLI::IsMember({"standard", "cluttered"}))
      ->capture_default_str();
  simulate->add_option("--config", sim.config)->capture_default_str();
  simulate->add_option("--outliers", sim.outliers, "Outlier points per frame")->capture_default_str();
  simulate->add_option("--frames", sim.frames)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--out", sim.out, "Run directory")->required();
  simulate->add_option("--noise", sim.noise, "Noise std-dev per axis [m]")->capture_default_str();
  simulate->add_option("--pts-per-line", sim.pts_per_line)->capture_default_str();
  simulate->add_option("--span", sim.span)->capture_default_str();
  simulate->add_option("--slice-center", sim.slice_center)->capture_default_str();
  simulate->add_option("--slice-width", sim.slice_width)->capture_default_str();
  simulate->add_option("--outlier-extent", sim.outlier_extent)->capture_default_str();
  simulate->add_option("--outlier-lateral", sim.outlier_lateral)->capture_default_str();

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Track the array through a run directory");
  estimate->add_option("--run", est.run, "Run directory")->required();
  estimate->add_option("--out", est.out, "Results CSV (default <run>/results.csv)");
  estimate->add_option("--prior", est.prior, "Initial prior, 5+l values")->delimiter(',');
  estimate->add_flag("--prior-from-truth", est.prior_from_truth, "Start from truth.csv");
  estimate->add_option("--perturb-seed", est.perturb_seed,
                       "Start from truth.csv plus a seeded random perturbation");
  estimate->add_option("--prior-sigma", est.prior_sigma, "Perturbation std-dev, 5+l values")
      ->delimiter(',');
  estimate->add_option("--seed", est.seed, "Restart seed")->capture_default_str();
  estimate->add_option("--filter", est.filter, "none, corridor, ground or cluster")
      ->check(CLI::IsMember({"none", "corridor", "ground", "cluster"}))
      ->capture_default_str();
  estimate->add_option("--threshold", est.threshold, "Accuracy distance threshold [m]")
      ->capture_default_str();
  estimate->add_flag("--no-timing", est.no_timing, "Write timing columns as 0");
  est.solver.add(estimate);
  est.filters.add(estimate);

  BenchmarkOptions bench;
  auto* benchmark = app.add_subcommand("benchmark", "Outlier sensitivity study");
  benchmark->add_option("--mode", bench.mode)
      ->check(CLI::IsMember({"global", "partial"}))
      ->capture_default_str();
  benchmark->add_option("--outliers", bench.outliers, "Comma-separated outlier counts")
      ->delimiter(',')
      ->capture_default_str();
  benchmark->add_option("--repeats", bench.repeats)->capture_default_str();
  benchmark->add_option("--frames", bench.frames)->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--window", bench.window, "Last frames used for metrics")
      ->capture_default_str();
  benchmark->add_option("--seed", bench.seed)->capture_default_str();
  benchmark->add_option("--out", bench.out, "Study CSV (default stdout)");
  benchmark->add_option("--frame-log", bench.frame_log, "Per-frame CSV of every run");
  benchmark->add_flag("--no-timing", bench.no_timing, "Write timing columns as 0");
  benchmark->add_option("--noise", bench.noise)->capture_default_str();
  benchmark->add_option("--outlier-extent", bench.outlier_extent)->capture_default_str();
  benchmark->add_option("--outlier-lateral", bench.outlier_lateral)->capture_default_str();
  bench.solver.add(benchmark);

  FilterCmdOptions filt;
  auto* filter = app.add_subcommand("filter", "Filter frames before estimation");
  filter->add_option("--method", filt.method, "corridor, ground or cluster")
      ->check(CLI::IsMember({"corridor", "ground", "cluster"}))
      ->required();
  filter->add_option("--in", filt.in, "Run directory or single frame CSV")->required();
  filter->add_option("--out", filt.out, "Output directory")->required();
  filter->add_option("--seed", filt.seed, "RANSAC seed")->capture_default_str();
  filt.filters.add(filter);

  ExportOptions exp;
  auto* export_curves = app.add_subcommand("export-curves", "Sample the fitted curves");
  export_curves->add_option("--config", exp.config)->capture_default_str();
  export_curves->add_option("--p", exp.p, "Parameter vector, 5+l values")->delimiter(',');
  export_curves->add_option("--results", exp.results, "results.csv to read the parameters from");
  export_curves->add_option("--row", exp.row, "Result row, negative counts from the end")
      ->capture_default_str();
  export_curves->add_option("--x-min", exp.x_min)->capture_default_str();
  export_curves->add_option("--x-max", exp.x_max)->capture_default_str();
  export_curves->add_option("--n", exp.n, "Samples per conductor")->capture_default_str();
  export_curves->add_option("--out", exp.out, "Curves CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (estimate->parsed()) return cmd_estimate(est);
    if (benchmark->parsed()) return cmd_benchmark(bench);
    if (filter->parsed()) return cmd_filter(filt);
    if (export_curves->parsed()) return cmd_export_curves(exp);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
