// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "catarray/filters.hpp"
#include "catarray/io.hpp"
#include "catarray/metrics.hpp"
#include "test_support.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace catarray;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++g_failures;
  std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": "
            << o.detail << " [" << fmt("%.1f", seconds_since(t0)) << " s]" << std::endl;
}

StudyReport global_study(const std::vector<int>& n_o, int repeats, ObservationMode mode) {
  StudyTemplate tpl;
  tpl.mode = mode;
  tpl.seed = 20240601;
  return sensitivity_study(tpl, n_o, repeats, default_settings(config_222()));
}

const StudyRow& row_for(const StudyReport& r, int n_o) {
  for (const auto& row : r.rows) {
    if (row.n_outliers == n_o) return row;
  }
  throw std::runtime_error("missing study row");
}

// -- 1 ----------------------------------------------------------------------
Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto g = test::random_gradient_instance(rng);
    const Eigen::VectorXd analytic = evaluate_loss(g.p, g.cloud, g.prior, g.weights, g.config).gradient;
    const Eigen::VectorXd fd = test::numeric_gradient(g.p, g.cloud, g.prior, g.weights, g.config);
    worst = std::max(worst, test::relative_error(analytic, fd));
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-5 && dt < 10.0,
          "max relative error " + fmt("%.2e", worst) + " (< 1e-5), " + fmt("%.2f", dt) + " s (< 10)"};
}

// -- 2 ----------------------------------------------------------------------
Outcome association_oracle() {
  // flat arrays (a >= 1000, |x| <= 50): there the closed form is the Euclidean distance
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const ConductorConfig cfg = config_222();
  for (int inst = 0; inst < 20; ++inst) {
    const ParamVector p(-20 + 40 * u(rng), -20 + 40 * u(rng), 10 + 30 * u(rng),
                        std::numbers::pi * (2 * u(rng) - 1), 1000 + 4000 * u(rng),
                        {0.5 + 9.5 * u(rng), 0.5 + 9.5 * u(rng)});
    for (int i = 0; i < 50; ++i) {
      const Point3 pt = test::near_model_point(p, cfg, 50.0, 5.0, rng);
      const double d = distance_to_model(p, cfg, pt).d;
      worst = std::max(worst, std::abs(d - test::sampled_distance(p, cfg, pt)));
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-2 && dt < 30.0,
          "max |d - d_sampled| " + fmt("%.2e", worst) + " m over 1000 points (<= 1e-2), " +
              fmt("%.2f", dt) + " s (< 30)"};
}

// -- 3, 4, 6 ----------------------------------------------------------------
struct GlobalSweep {
  StudyReport report;
  double seconds = 0.0;
};

const GlobalSweep& global_sweep() {
  static const GlobalSweep sweep = [] {
    const auto t0 = Clock::now();
    GlobalSweep s;
    s.report = global_study({10, 50, 60, 150, 300}, 20, ObservationMode::kGlobal);
    s.seconds = seconds_since(t0);
    return s;
  }();
  return sweep;
}

Outcome global_tracking() {
  const auto& row = row_for(global_sweep().report, 10);
  const bool ok = row.accuracy.mean >= 98.0 && row.abs_a_error.mean <= 25.0;
  return {ok, "accuracy " + fmt("%.1f", row.accuracy.mean) + " +/- " + fmt("%.1f", row.accuracy.std) +
                  " % (>= 98), mean |a_e| " + fmt("%.1f", row.abs_a_error.mean) + " m (<= 25)"};
}

Outcome outlier_ordering() {
  const auto& r = global_sweep().report;
  std::string detail = "accuracy by n_o:";
  double prev = 1e300;
  bool monotone = true;
  for (int n : {10, 50, 150, 300}) {
    const double acc = row_for(r, n).accuracy.mean;
    monotone = monotone && acc <= prev;
    prev = acc;
    detail += " " + std::to_string(n) + "=" + fmt("%.1f", acc) + " (" +
              std::to_string(row_for(r, n).frames_over_100) + " frames >100%)";
  }
  const double drop = row_for(r, 10).accuracy.mean - row_for(r, 150).accuracy.mean;
  detail += "; non-increasing " + std::string(monotone ? "yes" : "no") + ", drop 10->150 " +
            fmt("%.1f", drop) + " pp (>= 20)";
  return {monotone && drop >= 20.0, detail};
}

Outcome robustness_threshold() {
  const auto& row = row_for(global_sweep().report, 60);
  std::string detail = "accuracy at n_o=60 " + fmt("%.1f", row.accuracy.mean) + " +/- " +
                       fmt("%.1f", row.accuracy.std) + " % (>= 90), conductor points per frame " +
                       fmt("%.1f", row.n_pts.mean - 60.0);
  // knee: smallest outlier count whose mean accuracy drops below 90 %
  const auto sweep = global_study({12, 14, 16, 18, 20, 30, 40}, 20, ObservationMode::kGlobal);
  std::vector<std::pair<int, double>> curve{{10, row_for(global_sweep().report, 10).accuracy.mean}};
  for (const auto& k : sweep.rows) curve.emplace_back(k.n_outliers, k.accuracy.mean);
  for (int n : {50, 60}) curve.emplace_back(n, row_for(global_sweep().report, n).accuracy.mean);
  detail += "; sweep (20 repeats):";
  int knee = -1;
  for (const auto& [n, acc] : curve) {
    detail += " " + std::to_string(n) + "=" + fmt("%.1f", acc);
    if (knee < 0 && acc < 90.0) knee = n;
  }
  detail += "; knee at n_o=" + std::to_string(knee);
  return {row.accuracy.mean >= 90.0, detail};
}

// -- 5 ----------------------------------------------------------------------
Outcome partial_observation() {
  const auto r = global_study({10}, 20, ObservationMode::kPartial);
  const auto& row = r.rows.front();
  const bool ok = row.accuracy.mean >= 95.0 && row.abs_a_error.mean > 100.0;
  return {ok, "accuracy " + fmt("%.1f", row.accuracy.mean) + " +/- " + fmt("%.1f", row.accuracy.std) +
                  " % (>= 95), a_e " + fmt("%.1f", row.a_error.mean) + " +/- " +
                  fmt("%.1f", row.a_error.std) + ", mean |a_e| " + fmt("%.1f", row.abs_a_error.mean) +
                  " m (> 100)"};
}

// -- 7 ----------------------------------------------------------------------
Outcome timing_budget() {
  // about 300 conductor points plus 30 outliers, q = 6
  Scenario sc = make_scenario(ObservationMode::kGlobal, 30, 30, 707);
  sc.pts_per_line_max = 100;
  const auto frames = generate_sequence(sc);
  std::vector<PointCloud> clouds;
  std::size_t max_pts = 0;
  for (const auto& f : frames) {
    // at most 300 conductor points plus all outliers keeps m <= 330
    PointCloud c;
    std::size_t on_lines = 0;
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      if (f.labels[i] >= 0 && on_lines++ >= 300) continue;
      c.points.push_back(f.cloud.points[i]);
    }
    max_pts = std::max(max_pts, c.size());
    clouds.push_back(std::move(c));
  }
  std::mt19937_64 rng(7);
  const EstimatorSettings s = default_settings(sc.config);
  const ParamVector prior =
      random_prior(sc.truth, default_prior_sigma(sc.config), s.bounds.resolve(sc.truth), rng);
  std::vector<double> ms;
  for (const auto& r : track_sequence(clouds, prior, s, sc.config)) {
    for (double t : r.start_times_s) ms.push_back(1e3 * t);
  }
  const MeanStd m = mean_std(ms);
  const double worst = *std::max_element(ms.begin(), ms.end());
  return {m.mean <= 50.0,
          "per-start " + fmt("%.2f", m.mean) + " +/- " + fmt("%.2f", m.std) + " ms, max " +
              fmt("%.2f", worst) + " ms (<= 50; reference 6-10 ms), frames up to " +
              std::to_string(max_pts) + " points"};
}

// -- 8 ----------------------------------------------------------------------
Outcome filter_comparison() {
  const ConductorConfig cfg = config_222();
  const char* names[] = {"corridor", "cluster", "ground"};
  double acc[3] = {0, 0, 0};
  int counted[3] = {0, 0, 0};
  double conductors = 0.0, pylon = 0.0;
  int n_frames = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const ClutterSpec spec = default_clutter(1000 + static_cast<std::uint64_t>(rep), 20, cfg);
    const auto frames = generate_cluttered_sequence(spec);
    const auto [a, b] = spec.anchors();
    CorridorSpec corridor;
    corridor.anchor_a = a;
    corridor.anchor_b = b;
    EstimatorSettings s = default_settings(cfg);
    s.seed = frame_seed(88, static_cast<std::size_t>(rep));
    std::mt19937_64 prior_rng(static_cast<std::uint64_t>(rep));
    const ParamVector prior = random_prior(spec.base.truth, default_prior_sigma(cfg),
                                           s.bounds.resolve(spec.base.truth), prior_rng);
    for (const auto& f : frames) {
      for (int l : f.labels) {
        conductors += l >= 0 ? 1 : 0;
        pylon += l == kPylonLabel ? 1 : 0;
      }
      ++n_frames;
    }
    for (int m = 0; m < 3; ++m) {
      std::vector<PointCloud> clouds;
      for (std::size_t t = 0; t < frames.size(); ++t) {
        std::mt19937_64 rng(frame_seed(static_cast<std::uint64_t>(rep), t));
        const FilterResult fr = m == 0   ? corridor_filter(frames[t].cloud, corridor)
                                : m == 1 ? clustering_filter(frames[t].cloud, RansacSpec{}, ClusterSpec{}, rng)
                                         : ground_filter_ransac(frames[t].cloud, RansacSpec{}, rng);
        clouds.push_back(fr.cloud);
      }
      const auto results = track_sequence(clouds, prior, s, cfg);
      for (std::size_t t = frames.size() - 5; t < frames.size(); ++t) {
        PointCloud on_lines;
        for (std::size_t i = 0; i < frames[t].labels.size(); ++i) {
          if (frames[t].labels[i] >= 0) on_lines.points.push_back(frames[t].cloud.points[i]);
        }
        const auto r = accuracy(results[t].p_hat_new, spec.base.truth, on_lines, cfg);
        if (r.accuracy_pct) {
          acc[m] += *r.accuracy_pct;
          ++counted[m];
        }
      }
    }
  }
  std::string detail = "scene " + fmt("%.0f", conductors / n_frames) + " conductor / " +
                       fmt("%.0f", pylon / n_frames) + " pylon points per frame; accuracy";
  for (int m = 0; m < 3; ++m) {
    acc[m] /= std::max(counted[m], 1);
    detail += std::string(" ") + names[m] + "=" + fmt("%.1f", acc[m]);
  }
  detail += " (corridor, cluster >= 95; ground <= 50)";
  return {acc[0] >= 95.0 && acc[1] >= 95.0 && acc[2] <= 50.0, detail};
}

// -- 9 ----------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CATARRAY_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "catarray_acceptance_det";
  fs::remove_all(root);
  for (const char* d : {"a", "b"}) {
    const std::string dir = (root / d).string();
    if (run_cli("simulate --frames 10 --outliers 50 --seed 31 --out " + dir) != 0 ||
        run_cli("estimate --run " + dir + " --perturb-seed 4 --seed 9 --no-timing") != 0 ||
        run_cli("benchmark --outliers 10,50 --repeats 2 --frames 10 --window 5 --seed 3 --no-timing --out " +
                dir + "/study.csv --frame-log " + dir + "/frames.csv") != 0) {
      return {false, "CLI invocation failed"};
    }
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++compared;
    if (slurp(e.path()) != slurp(root / "b" / e.path().filename())) ++differing;
  }
  fs::remove_all(root);
  return {compared > 0 && differing == 0,
          std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ"};
}

// -- 10 ---------------------------------------------------------------------
Outcome multi_start() {
  const test::TwoBasinInstance inst;
  int with = 0, without = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    without += test::TwoBasinInstance::recovered(
        estimate_frame(inst.cloud, inst.decoy, inst.settings(0, seed), inst.config).p_hat_new);
    with += test::TwoBasinInstance::recovered(
        estimate_frame(inst.cloud, inst.decoy, inst.settings(10, seed), inst.config).p_hat_new);
  }
  return {with - without >= 50, "success n_search=10 " + std::to_string(with) + "%, n_search=0 " +
                                    std::to_string(without) + "% (difference >= 50 pp)"};
}

}  // namespace

int main() {
  report(1, "gradient correctness", gradient_check);
  report(2, "association oracle", association_oracle);
  report(3, "global tracking", global_tracking);
  report(4, "outlier degradation ordering", outlier_ordering);
  report(5, "partial observation", partial_observation);
  report(6, "robustness threshold", robustness_threshold);
  report(7, "timing budget", timing_budget);
  report(8, "filter comparison", filter_comparison);
  report(9, "determinism", determinism);
  report(10, "multi-start necessity", multi_start);
  std::cout << "global sweep runtime " << fmt("%.0f", global_sweep().seconds) << " s" << std::endl;
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
