// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pcount/calibration.hpp"
#include "pcount/cli.hpp"
#include "pcount/counting.hpp"
#include "pcount/exec.hpp"
#include "pcount/filtration.hpp"
#include "pcount/grid.hpp"
#include "pcount/oracle.hpp"
#include "pcount/phantom.hpp"
#include "pcount/stats.hpp"
#include "pcount/volume_io.hpp"
#include "support.hpp"

using namespace pcount;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> theta_32() { return make_grid(0.0, 1.0, 1.0 / 32); }

std::vector<float> distinct_levels(const Volume& v) {
  std::vector<float> levels;
  for (float x : v.data)
    if (x > 0.0f) levels.push_back(x);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

std::vector<Volume> random_suite() {
  std::mt19937_64 rng(20240917);
  std::vector<Volume> suite;
  for (int n = 0; n < 250; ++n) suite.push_back(test::random_quantized(rng, 12));
  return suite;
}

// The noisy longitudinal benchmark shared by criteria 4, 6, 7 and 10.
struct Benchmark {
  test::TempDir dir{"acceptance"};
  std::string manifest;
  std::vector<Volume> volumes;
  double seconds = 0.0;
};

const std::vector<std::string> kBenchmarkPhantom{"phantom", "--subjects", "10", "--timepoints", "5",
                                                 "--lesions-min", "5", "--lesions-max", "20",
                                                 "--speckles", "40", "--amplitude", "0.3",
                                                 "--background", "0.02", "--dims", "40,80,40",
                                                 "--seed", "2024"};
const char* kBenchmarkGrid = "0:0.6:0.02";

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::fprintf(stderr, "cli failed (%d): %s", code, e.str().c_str());
  return code;
}

Benchmark& benchmark() {
  static Benchmark bm;
  if (!bm.manifest.empty()) return bm;
  const auto t0 = Clock::now();
  auto args = kBenchmarkPhantom;
  args.insert(args.end(), {"--out", bm.dir.path().string()});
  if (run_cli(args) != 0) throw std::runtime_error("benchmark generation failed");
  for (const auto& s : load_manifest(bm.dir / "manifest.json").subjects)
    for (const auto& tp : s.timepoints) bm.volumes.push_back(load_volume(tp.volume_path));
  bm.manifest = (bm.dir / "manifest.json").string();
  bm.seconds = seconds_since(t0);
  return bm;
}

std::vector<std::pair<float, float>> positive_pairs(const PersistenceDiagram& pd) {
  std::vector<std::pair<float, float>> out;
  for (const auto& d : pd.dots)
    if (!d.zero_persistence()) out.emplace_back(d.birth, d.death);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<float, std::size_t>> essentials_of(const PersistenceDiagram& pd) {
  std::vector<std::pair<float, std::size_t>> out;
  for (const auto& e : pd.essentials) out.emplace_back(e.birth, e.birth_vertex);
  std::sort(out.begin(), out.end());
  return out;
}

Verdict count_equivalence() {
  const auto t0 = Clock::now();
  const auto grid = theta_32();
  std::size_t checks = 0, failures = 0;
  for (const Volume& v : random_suite()) {
    const PersistenceDiagram pd = compute_persistence(v);
    const PersistenceDiagram ref = oracle::brute_force_diagram(v);
    for (double theta : grid) {
      const std::size_t merged = pcount_merge(v, theta).count;
      const std::size_t from_pd = count_from_diagram(pd, theta);
      const std::size_t from_ref = count_from_diagram(ref, theta);
      failures += !(merged == from_pd && from_pd == from_ref);
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "250 volumes x %zu thetas = %zu checks, %zu failures, %.2f s (limit 60 s)",
                grid.size(), checks, failures, secs);
  return {failures == 0 && secs < 60.0, buf};
}

Verdict diagram_equivalence() {
  std::size_t failures = 0, dots = 0;
  for (const Volume& v : random_suite()) {
    const PersistenceDiagram pd = compute_persistence(v);
    const PersistenceDiagram ref = oracle::brute_force_diagram(v);
    const auto a = positive_pairs(pd);
    dots += a.size();
    failures += !(a == positive_pairs(ref) && essentials_of(pd) == essentials_of(ref));
  }
  return {failures == 0, "250 volumes, " + std::to_string(dots) + " positive dots compared, " +
                             std::to_string(failures) + " mismatching diagrams"};
}

Verdict baseline_equivalence() {
  std::size_t checks = 0, failures = 0;
  for (const Volume& v : random_suite())
    for (float level : distinct_levels(v)) {
      failures += direct_threshold_count(v, level) != oracle::brute_force_components(v, level).size();
      ++checks;
    }
  return {failures == 0, std::to_string(checks) + " (volume, level) checks, " + std::to_string(failures) + " failures"};
}

bool non_increasing(const std::vector<std::size_t>& c) {
  return std::is_sorted(c.rbegin(), c.rend());
}

Verdict monotonicity() {
  std::size_t curves = 0, failures = 0;
  const auto fine = theta_32();
  const auto wide = parse_grid(kBenchmarkGrid);
  for (const Volume& v : random_suite()) {
    for (const auto& grid : {default_persistence_grid(), fine}) {
      failures += !non_increasing(sweep_persistence(v, grid).counts);
      ++curves;
    }
  }
  for (const Volume& v : benchmark().volumes)
    for (const auto& grid : {default_persistence_grid(), wide}) {
      failures += !non_increasing(sweep_persistence(v, grid).counts);
      ++curves;
    }
  return {failures == 0, std::to_string(curves) + " count curves (250 random volumes, " +
                             std::to_string(benchmark().volumes.size()) + " phantoms), " + std::to_string(failures) +
                             " increases"};
}

Volume embed_pair(const Volume& a, const Volume& b, std::size_t gap) {
  const Dims d{a.dims.nx + gap + b.dims.nx, std::max(a.dims.ny, b.dims.ny), std::max(a.dims.nz, b.dims.nz)};
  Volume out(d, a.voxel_size_mm);
  for (std::size_t z = 0; z < a.dims.nz; ++z)
    for (std::size_t y = 0; y < a.dims.ny; ++y)
      for (std::size_t x = 0; x < a.dims.nx; ++x) out.at(x, y, z) = a.at(x, y, z);
  for (std::size_t z = 0; z < b.dims.nz; ++z)
    for (std::size_t y = 0; y < b.dims.ny; ++y)
      for (std::size_t x = 0; x < b.dims.nx; ++x) out.at(a.dims.nx + gap + x, y, z) = b.at(x, y, z);
  return out;
}

Verdict additivity() {
  std::mt19937_64 rng(515);
  std::vector<double> grid = default_persistence_grid();
  for (double t : theta_32()) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::size_t failures = 0;
  for (int pair = 0; pair < 50; ++pair) {
    oracle::Phantom parts[2];
    for (auto& part : parts) {
      oracle::PhantomSpec spec;
      spec.dims = {14 + rng() % 10, 14 + rng() % 10, 14 + rng() % 10};
      spec.n_lesions = static_cast<int>(1 + rng() % 4);
      spec.noise_speckles = static_cast<int>(rng() % 20);
      spec.seed = rng();
      part = oracle::generate_phantom(spec);
    }
    const Volume joined = embed_pair(parts[0].volume, parts[1].volume, 2);
    const auto whole = sweep_persistence(joined, grid).counts;
    const auto left = sweep_persistence(parts[0].volume, grid).counts;
    const auto right = sweep_persistence(parts[1].volume, grid).counts;
    for (std::size_t j = 0; j < grid.size(); ++j) failures += whole[j] != left[j] + right[j];
  }
  return {failures == 0,
          "50 phantom pairs x " + std::to_string(grid.size()) + " thetas, " + std::to_string(failures) + " failures"};
}

Verdict benchmark_direction() {
  const auto t0 = Clock::now();
  Benchmark& bm = benchmark();
  std::string detail;
  bool pass = true;
  for (const char* mode : {"supervised", "unsupervised"}) {
    std::string out;
    if (run_cli({"calibrate", "--manifest", bm.manifest, "--mode", mode, "--grid", kBenchmarkGrid, "--folds", "5",
                 "--seed", "7", "--compare-baseline"},
                &out) != 0)
      return {false, "calibrate failed"};
    const auto j = nlohmann::json::parse(out);
    const double pers = j["mean_mae"].get<double>();
    const double base = j["baseline"]["mean_mae"].get<double>();
    const auto& p = j["ttest"]["p"];
    const double pval = p.is_number() ? p.get<double>() : (p == "inf" ? INFINITY : NAN);
    pass = pass && pers < base;
    if (std::string(mode) == "unsupervised") pass = pass && pval < 0.05;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s MAE %.3f vs %.3f (p=%.3g)", detail.empty() ? "" : "; ", mode, pers, base,
                  pval);
    detail += buf;
  }
  const double secs = seconds_since(t0) + bm.seconds;
  char buf[64];
  std::snprintf(buf, sizeof buf, "; %.1f s (limit 300 s)", secs);
  return {pass && secs < 300.0, detail + buf};
}

double population_sd(const std::vector<std::size_t>& c) {
  double mean = 0.0;
  for (auto x : c) mean += static_cast<double>(x);
  mean /= static_cast<double>(c.size());
  double ss = 0.0;
  for (auto x : c) ss += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  return std::sqrt(ss / static_cast<double>(c.size()));
}

Verdict threshold_stability() {
  double pers = 0.0, direct = 0.0;
  const auto& vols = benchmark().volumes;
  for (const Volume& v : vols) {
    pers += population_sd(sweep_persistence(v, default_persistence_grid()).counts);
    direct += population_sd(sweep_direct(v, default_direct_grid()).counts);
  }
  pers /= static_cast<double>(vols.size());
  direct /= static_cast<double>(vols.size());
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean count SD over grid: persistence %.3f vs direct %.3f (%zu volumes)", pers,
                direct, vols.size());
  return {pers < direct, buf};
}

Verdict performance() {
  set_max_threads(1);
  oracle::PhantomSpec spec;
  spec.dims = {40, 80, 40};
  spec.n_lesions = 20;
  spec.noise_speckles = 40;
  spec.background = 0.02;
  spec.seed = 88;
  const Volume phantom = oracle::generate_phantom(spec).volume;
  // Worst case for the sweep: every voxel is foreground and almost every one
  // is a local event.
  Volume noise(spec.dims, spec.voxel_size_mm);
  std::mt19937_64 rng(4);
  for (float& x : noise.data) x = static_cast<float>((rng() >> 11) * 0x1.0p-53);

  std::string detail;
  bool pass = true;
  for (const auto& [name, vol] : {std::pair<const char*, const Volume*>{"phantom", &phantom}, {"uniform noise", &noise}}) {
    std::vector<double> times;
    for (int k = 0; k < 5; ++k) {
      const auto t0 = Clock::now();
      volatile std::size_t c = pcount_merge(*vol, 0.02, 0.0, Exec::serial).count;
      (void)c;
      times.push_back(seconds_since(t0));
    }
    std::sort(times.begin(), times.end());
    pass = pass && times[2] < 1.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%s median %.1f ms", detail.empty() ? "" : ", ", name, times[2] * 1e3);
    detail += buf;
  }
  set_max_threads(0);
  return {pass, "40x80x40, 1 thread, 5 runs: " + detail + " (limit 1000 ms)"};
}

// Student-t two-tailed p by Simpson's rule; independent of the incomplete
// beta route used by paired_ttest.
double simpson_p(double t, double dof) {
  const double c = std::tgamma((dof + 1) / 2) / (std::sqrt(dof * std::numbers::pi) * std::tgamma(dof / 2));
  const int n = 200000;
  const double h = std::fabs(t) / n;
  auto f = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
  double s = f(0) + f(std::fabs(t));
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * f(k * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

Verdict calibration_anchors() {
  CountTable table;
  table.theta_grid = {0.0, 0.01, 0.02, 0.03};
  table.y = {{{9, 9, 9}, {7, 8, 8}, {5, 6, 8}, {2, 2, 2}}, {{6, 6, 7}, {5, 5, 6}, {3, 4, 4}, {1, 1, 1}}};
  table.t_values = {{1, 2, 3}, {1, 2, 3}};
  const Selection sel = supervised_select(table, {{5, 6, 8}, {3, 4, 4}});
  const bool select_ok = sel.index == 2 && sel.objective[2] == 0.0;

  const std::vector<double> series{1, 3, 2};
  const LineFit fit = linear_fit(series);
  const bool fit_ok =
      std::fabs(fit.slope - 0.5) < 1e-9 && std::fabs(fit.intercept - 1.0) < 1e-9 && std::fabs(fit.sse - 1.5) < 1e-9;

  const std::vector<double> d{2, 0, 1, 3, -1}, zero(5, 0.0);
  const TTestResult tt = paired_ttest(d, zero);
  const double ref = simpson_p(tt.t_statistic, 4);
  const bool t_ok = std::fabs(tt.t_statistic - 1.4142) < 1e-3 && std::fabs(tt.p_value - 0.2302) < 1e-3 &&
                    std::fabs(tt.p_value - ref) < 1e-3;
  char buf[200];
  std::snprintf(buf, sizeof buf, "select idx %zu; fit a=%.9f b=%.9f sse=%.9f; t=%.4f p=%.4f (integrator %.4f)",
                sel.index, fit.slope, fit.intercept, fit.sse, tt.t_statistic, tt.p_value, ref);
  return {select_ok && fit_ok && t_ok, buf};
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files[e.path().filename().string()] = test::read_file(e.path());
  return files;
}

Verdict determinism() {
  Benchmark& bm = benchmark();
  test::TempDir dir("acceptance-det");
  const std::string vol = (bm.dir / "sub-003_tp-04.json").string();
  std::size_t commands = 0, mismatches = 0;

  // Commands whose result is on stdout or in a single output file.
  const std::vector<std::vector<std::string>> commands_stdout{
      {"count", "--input", vol, "--theta", "0.3"},
      {"count", "--input", vol, "--method", "threshold", "--tau", "0.5", "--crop", "--downsample", "2"},
      {"sweep", "--input", vol, "--method", "persistence", "--grid", kBenchmarkGrid},
      {"sweep", "--input", vol, "--method", "threshold"},
      {"diagram", "--input", vol, "--output", "-"},
      {"calibrate", "--manifest", bm.manifest, "--mode", "supervised", "--grid", kBenchmarkGrid, "--seed", "7",
       "--compare-baseline"},
      {"calibrate", "--manifest", bm.manifest, "--mode", "unsupervised", "--seed", "7", "--compare-baseline"},
  };
  for (const auto& args : commands_stdout) {
    std::string a, b;
    run_cli(args, &a);
    run_cli(args, &b);
    mismatches += a != b || a.empty();
    ++commands;
  }

  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"p1", "p2"}) {
    auto args = kBenchmarkPhantom;
    args.insert(args.end(), {"--out", (dir / name).string()});
    run_cli(args);
    runs.push_back(snapshot(dir / name));
  }
  mismatches += runs[0] != runs[1] || runs[0].size() != 101;
  ++commands;

  std::map<std::string, std::string> pre[2];
  for (auto& snap : pre) {
    const auto out = dir / "pre";
    std::filesystem::remove_all(out);
    std::filesystem::create_directories(out);
    run_cli({"preprocess", "--input", vol, "--output", (out / "v.json").string(), "--crop-eps", "0.05",
             "--downsample", "2"});
    snap = snapshot(out);
  }
  mismatches += pre[0] != pre[1] || pre[0].size() != 2;
  ++commands;

  return {mismatches == 0, std::to_string(commands) + " command invocations rerun, " + std::to_string(mismatches) +
                               " differing outputs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle count equivalence", count_equivalence},
      {"oracle diagram equivalence", diagram_equivalence},
      {"baseline equivalence", baseline_equivalence},
      {"monotonicity", monotonicity},
      {"disjoint additivity", additivity},
      {"synthetic benchmark direction", benchmark_direction},
      {"threshold stability", threshold_stability},
      {"performance", performance},
      {"calibration unit anchors", calibration_anchors},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s  %2zu  %-30s %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
