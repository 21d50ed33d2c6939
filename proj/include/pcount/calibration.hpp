#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcount/counting.hpp"
#include "pcount/exec.hpp"
#include "pcount/stats.hpp"

namespace pcount {

struct Timepoint {
  int t_index = 1;
  std::filesystem::path volume_path;
  std::optional<int> gt_count;
};

struct Subject {
  std::string subject_id;
  std::vector<Timepoint> timepoints;
};

// Subjects x timepoints. Every subject has at least two timepoints with
// strictly increasing t_index.
struct LongitudinalManifest {
  std::vector<Subject> subjects;

  bool has_ground_truth() const noexcept;
};

// Throws FormatError when the invariants above do not hold.
void validate(const LongitudinalManifest& manifest);

// Relative volume paths are resolved against the manifest's directory.
LongitudinalManifest load_manifest(const std::filesystem::path& path);
// Volume paths are written as given.
void write_manifest(const LongitudinalManifest& manifest, const std::filesystem::path& path);

// y[i][j][t]: count of subject i at grid index j, timepoint t.
struct CountTable {
  std::vector<double> theta_grid;
  std::vector<std::vector<double>> t_values;  // per subject, the t_index values
  std::vector<std::vector<std::vector<int>>> y;

  std::size_t subjects() const noexcept { return y.size(); }
};

// Ground-truth counts per subject and timepoint.
using GroundTruth = std::vector<std::vector<int>>;

GroundTruth ground_truth(const LongitudinalManifest& manifest);

struct CountOptions {
  Method method = Method::persistence;
  double mask_eps = 0.0;
  Exec exec = Exec::parallel;
};

// Loads every volume once and counts it over the whole grid. Volumes are
// processed concurrently under Exec::parallel; the table does not depend on
// the order. A failing volume aborts with an IoError/FormatError naming it.
CountTable build_count_table(const LongitudinalManifest& manifest,
                             const std::vector<double>& grid, const CountOptions& options);

enum class Mode { supervised, unsupervised };

std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view text);

struct Selection {
  std::size_t index = 0;
  double theta = 0.0;
  std::vector<double> objective;  // per grid index
};

// argmin_j sum_{i,t} (gt[i][t] - y[i][j][t])^2, smallest theta on ties.
// `subjects` restricts the sum; empty means all.
Selection supervised_select(const CountTable& table, const GroundTruth& gt,
                            const std::vector<std::size_t>& subjects = {});

// argmin_j sum_i sse of a per-(subject, theta) line fit over t.
Selection unsupervised_select(const CountTable& table,
                              const std::vector<std::size_t>& subjects = {});

// Deterministic shuffle of [0, n) into `folds` contiguous near-equal folds;
// the first n % folds folds get one extra subject.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed);

struct CrossValidation {
  Mode mode = Mode::supervised;
  std::vector<std::vector<std::size_t>> folds;
  std::vector<double> fold_thetas;
  std::vector<double> fold_maes;
  double mean_mae = 0.0;
  // |gt - y| per (subject, timepoint) in subject-major order, at the
  // threshold chosen by the fold that held the subject out.
  std::vector<double> case_errors;
};

// K-fold cross-validation over subjects. Selection uses the mode's objective
// on the training subjects; the test-fold MAE always uses ground truth.
CrossValidation cross_validate(const CountTable& table, const GroundTruth& gt, Mode mode,
                               std::size_t folds, std::uint64_t seed);

struct MethodReport {
  Method method = Method::persistence;
  std::vector<double> grid;
  Selection selection;                // on all subjects
  std::optional<CrossValidation> cv;  // absent without ground truth
};

struct CalibrationReport {
  Mode mode = Mode::supervised;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  MethodReport persistence;
  std::optional<MethodReport> baseline;  // direct thresholding, same folds
  std::optional<TTestResult> ttest;      // persistence vs baseline case errors
};

struct CalibrationOptions {
  Mode mode = Mode::supervised;
  std::vector<double> grid;           // empty: default persistence grid
  std::vector<double> baseline_grid;  // empty: default probability grid
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  double mask_eps = 0.0;
  bool compare_baseline = false;
  Exec exec = Exec::parallel;
};

// Selects theta on the whole manifest and, when ground truth is present,
// cross-validates the choice. Supervised mode and the baseline comparison
// need ground truth everywhere.
CalibrationReport calibrate(const LongitudinalManifest& manifest,
                            const CalibrationOptions& options);

// JSON with keys mode, method, folds, seed, theta_star, objective_by_theta,
// fold_thetas, fold_maes, mean_mae; with a baseline also `baseline` (same
// keys) and `ttest` {t, p, baseline}.
std::string report_to_json(const CalibrationReport& report);

}  // namespace pcount
