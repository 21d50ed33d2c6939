#include "pcount/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcount/calibration.hpp"
#include "pcount/counting.hpp"
#include "pcount/error.hpp"
#include "pcount/exec.hpp"
#include "pcount/filtration.hpp"
#include "pcount/grid.hpp"
#include "pcount/phantom.hpp"
#include "pcount/volume_io.hpp"

namespace pcount::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void emit(const std::string& target, const std::string& text, std::ostream& out) {
  if (target.empty() || target == "-") {
    out << text;
    return;
  }
  std::ofstream f(target, std::ios::binary);
  if (!f) throw IoError("cannot open " + target + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + target);
}

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback) {
  return text.empty() ? fallback : parse_grid(text);
}

struct CountArgs {
  std::string input, method = "persistence";
  std::optional<double> theta, tau;
  double mask_eps = 0.0;
  bool crop = false;
  std::size_t downsample = 1;
};

int cmd_count(const CountArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  if (method == Method::persistence && (!a.theta || a.tau))
    throw InvalidArgument("--method persistence takes --theta (and not --tau)");
  if (method == Method::direct_threshold && (!a.tau || a.theta))
    throw InvalidArgument("--method threshold takes --tau (and not --theta)");

  Volume vol = load_volume(a.input);
  if (a.crop) vol = crop_to_foreground(vol, a.mask_eps);
  if (a.downsample > 1) vol = downsample(vol, a.downsample);

  std::size_t count = 0;
  double threshold = 0.0;
  if (method == Method::persistence) {
    threshold = *a.theta;
    count = pcount_merge(vol, threshold, a.mask_eps).count;
  } else {
    threshold = *a.tau;
    count = direct_threshold_count(vol, threshold);
  }
  ordered_json j;
  j["count"] = count;
  j["method"] = to_string(method);
  j["threshold"] = threshold;
  j["dims"] = {vol.dims.nx, vol.dims.ny, vol.dims.nz};
  j["voxel_size_mm"] = vol.voxel_size_mm;
  out << j.dump() << '\n';
  return 0;
}

struct DiagramArgs {
  std::string input, output;
  double mask_eps = 0.0;
};

int cmd_diagram(const DiagramArgs& a, std::ostream& out) {
  const Volume vol = load_volume(a.input);
  std::ostringstream csv;
  write_diagram_csv(csv, compute_persistence(vol, a.mask_eps));
  emit(a.output, csv.str(), out);
  return 0;
}

struct SweepArgs {
  std::string input, method = "persistence", grid, output;
  double mask_eps = 0.0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  const Volume vol = load_volume(a.input);
  std::ostringstream csv;
  if (method == Method::persistence)
    write_sweep_csv(csv, sweep_persistence(vol, grid_or(a.grid, default_persistence_grid()), a.mask_eps));
  else
    write_sweep_csv(csv, sweep_direct(vol, grid_or(a.grid, default_direct_grid())));
  emit(a.output, csv.str(), out);
  return 0;
}

struct CalibrateArgs {
  std::string manifest, mode = "supervised", grid, baseline_grid, output;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  double mask_eps = 0.0;
  bool compare_baseline = false;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  CalibrationOptions opt;
  opt.mode = parse_mode(a.mode);
  opt.grid = grid_or(a.grid, {});
  opt.baseline_grid = grid_or(a.baseline_grid, {});
  opt.folds = a.folds;
  opt.seed = a.seed;
  opt.mask_eps = a.mask_eps;
  opt.compare_baseline = a.compare_baseline;
  const CalibrationReport report = calibrate(load_manifest(a.manifest), opt);
  emit(a.output, report_to_json(report), out);
  return 0;
}

struct PhantomArgs {
  oracle::LongitudinalSpec spec;
  std::string out_dir;
  std::vector<std::size_t> dims;
  std::vector<double> voxel_size;
};

int cmd_phantom(PhantomArgs a, std::ostream& out) {
  if (!a.dims.empty()) a.spec.phantom.dims = {a.dims[0], a.dims[1], a.dims[2]};
  if (!a.voxel_size.empty()) a.spec.phantom.voxel_size_mm = {a.voxel_size[0], a.voxel_size[1], a.voxel_size[2]};
  const LongitudinalManifest m = oracle::generate_longitudinal(a.spec, a.out_dir);
  std::size_t volumes = 0;
  for (const Subject& s : m.subjects) volumes += s.timepoints.size();
  ordered_json j;
  j["manifest"] = (fs::path(a.out_dir) / "manifest.json").generic_string();
  j["subjects"] = m.subjects.size();
  j["volumes"] = volumes;
  out << j.dump() << '\n';
  return 0;
}

struct PreprocessArgs {
  std::string input, output;
  std::optional<double> crop_eps;
  std::size_t downsample = 1;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  Volume vol = load_volume(a.input);
  if (a.crop_eps) vol = crop_to_foreground(vol, *a.crop_eps);
  if (a.downsample > 1) vol = downsample(vol, a.downsample);
  write_raw_json(vol, a.output);
  ordered_json j;
  j["output"] = a.output;
  j["dims"] = {vol.dims.nx, vol.dims.ny, vol.dims.nz};
  j["voxel_size_mm"] = vol.voxel_size_mm;
  out << j.dump() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persistence-based lesion counting"};
  app.name("pcount");
  app.require_subcommand(1, 1);
  app.fallthrough();
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  CountArgs count;
  auto* c = app.add_subcommand("count", "Count lesions in one volume");
  c->add_option("--input", count.input)->required();
  c->add_option("--method", count.method)->check(CLI::IsMember({"persistence", "threshold", "direct_threshold"}));
  c->add_option("--theta", count.theta, "Persistence threshold");
  c->add_option("--tau", count.tau, "Probability threshold");
  c->add_option("--mask-eps", count.mask_eps);
  c->add_flag("--crop", count.crop, "Crop to p > mask-eps first");
  c->add_option("--downsample", count.downsample)->check(CLI::PositiveNumber);

  DiagramArgs diagram;
  auto* d = app.add_subcommand("diagram", "Write the persistence diagram as CSV");
  d->add_option("--input", diagram.input)->required();
  d->add_option("--output", diagram.output, "CSV path ('-' for stdout)")->required();
  d->add_option("--mask-eps", diagram.mask_eps);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Counts over a threshold grid");
  s->add_option("--input", sweep.input)->required();
  s->add_option("--method", sweep.method)->check(CLI::IsMember({"persistence", "threshold", "direct_threshold"}));
  s->add_option("--grid", sweep.grid, "A:B:STEP, inclusive");
  s->add_option("--output", sweep.output, "CSV path (default stdout)");
  s->add_option("--mask-eps", sweep.mask_eps);

  CalibrateArgs cal;
  auto* k = app.add_subcommand("calibrate", "Select theta over a longitudinal manifest");
  k->add_option("--manifest", cal.manifest)->required();
  k->add_option("--mode", cal.mode)->check(CLI::IsMember({"supervised", "unsupervised"}));
  k->add_option("--grid", cal.grid, "Persistence grid A:B:STEP");
  k->add_option("--baseline-grid", cal.baseline_grid, "Probability grid for the baseline");
  k->add_option("--folds", cal.folds)->check(CLI::PositiveNumber);
  k->add_option("--seed", cal.seed);
  k->add_option("--mask-eps", cal.mask_eps);
  k->add_flag("--compare-baseline", cal.compare_baseline);
  k->add_option("--output", cal.output, "Report path (default stdout)");

  PhantomArgs ph;
  auto* p = app.add_subcommand("phantom", "Generate a synthetic longitudinal dataset");
  p->add_option("--subjects", ph.spec.n_subjects)->check(CLI::PositiveNumber);
  p->add_option("--timepoints", ph.spec.timepoints);
  p->add_option("--out", ph.out_dir)->required();
  p->add_option("--seed", ph.spec.seed);
  p->add_option("--lesions-min", ph.spec.lesions_min);
  p->add_option("--lesions-max", ph.spec.lesions_max);
  p->add_option("--schedule", ph.spec.schedule, "Explicit per-timepoint lesion counts")->delimiter(',');
  p->add_option("--speckles", ph.spec.phantom.noise_speckles);
  p->add_option("--amplitude", ph.spec.phantom.noise_amplitude);
  p->add_option("--background", ph.spec.phantom.background);
  p->add_option("--radius-min", ph.spec.phantom.radius_min);
  p->add_option("--radius-max", ph.spec.phantom.radius_max);
  p->add_option("--dims", ph.dims, "NX,NY,NZ")->delimiter(',')->expected(3);
  p->add_option("--voxel-size", ph.voxel_size, "mm per axis")->delimiter(',')->expected(3);

  PreprocessArgs pre;
  auto* q = app.add_subcommand("preprocess", "Crop and/or downsample a volume");
  q->add_option("--input", pre.input)->required();
  q->add_option("--output", pre.output, "raw_json path")->required();
  q->add_option("--crop-eps", pre.crop_eps, "Crop to p > E first");
  q->add_option("--downsample", pre.downsample)->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    set_max_threads(jobs);
    if (*c) return cmd_count(count, out);
    if (*d) return cmd_diagram(diagram, out);
    if (*s) return cmd_sweep(sweep, out);
    if (*k) return cmd_calibrate(cal, out);
    if (*p) return cmd_phantom(ph, out);
    return cmd_preprocess(pre, out);
  } catch (const InvalidArgument& e) {
    err << "pcount: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "pcount: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pcount::cli
