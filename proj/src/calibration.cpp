#include "pcount/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include <json.hpp>

#include "pcount/error.hpp"
#include "pcount/filtration.hpp"
#include "pcount/grid.hpp"
#include "pcount/volume_io.hpp"

namespace pcount {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::size_t> all_subjects(std::size_t n) {
  std::vector<std::size_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

// First index within rounding distance of the minimum, so exact ties (and
// ties blurred by floating-point noise in the line fits) go to the smallest
// theta.
std::size_t argmin_smallest(const std::vector<double>& objective) {
  const double best = *std::min_element(objective.begin(), objective.end());
  const double tol = 1e-9 * std::max(1.0, std::fabs(best));
  for (std::size_t j = 0; j < objective.size(); ++j)
    if (objective[j] <= best + tol) return j;
  return 0;
}

Selection finish(const CountTable& table, std::vector<double> objective) {
  Selection s;
  s.index = argmin_smallest(objective);
  s.theta = table.theta_grid[s.index];
  s.objective = std::move(objective);
  return s;
}

void check_table(const CountTable& table) {
  if (table.theta_grid.empty()) throw InvalidArgument("count table has an empty grid");
  for (const auto& rows : table.y) {
    if (rows.size() != table.theta_grid.size()) throw InvalidArgument("count table is not fully populated");
    for (const auto& row : rows)
      if (row.size() != rows.front().size()) throw InvalidArgument("count table is not fully populated");
  }
}

void check_gt(const CountTable& table, const GroundTruth& gt) {
  if (gt.size() != table.subjects()) throw InvalidArgument("ground truth does not cover every subject");
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i].size() != table.y[i].front().size())
      throw InvalidArgument("ground truth does not cover every timepoint of subject " + std::to_string(i));
}

}  // namespace

bool LongitudinalManifest::has_ground_truth() const noexcept {
  for (const auto& s : subjects)
    for (const auto& tp : s.timepoints)
      if (!tp.gt_count) return false;
  return !subjects.empty();
}

void validate(const LongitudinalManifest& manifest) {
  if (manifest.subjects.empty()) throw FormatError("manifest has no subjects");
  for (const auto& s : manifest.subjects) {
    if (s.timepoints.size() < 2)
      throw FormatError("subject '" + s.subject_id + "' needs at least two timepoints");
    for (std::size_t t = 0; t < s.timepoints.size(); ++t) {
      if (t > 0 && s.timepoints[t].t_index <= s.timepoints[t - 1].t_index)
        throw FormatError("subject '" + s.subject_id + "': t_index must be strictly increasing");
      if (s.timepoints[t].gt_count && *s.timepoints[t].gt_count < 0)
        throw FormatError("subject '" + s.subject_id + "': negative gt_count");
    }
  }
}

LongitudinalManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  LongitudinalManifest m;
  try {
    const json j = json::parse(in);
    for (const auto& s : j.at("subjects")) {
      Subject subject;
      subject.subject_id = s.at("subject_id").get<std::string>();
      for (const auto& tp : s.at("timepoints")) {
        Timepoint t;
        t.t_index = tp.at("t_index").get<int>();
        std::filesystem::path p = tp.at("volume_path").get<std::string>();
        t.volume_path = p.is_relative() ? path.parent_path() / p : p;
        if (tp.contains("gt_count") && !tp["gt_count"].is_null()) t.gt_count = tp["gt_count"].get<int>();
        subject.timepoints.push_back(std::move(t));
      }
      m.subjects.push_back(std::move(subject));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  validate(m);
  return m;
}

void write_manifest(const LongitudinalManifest& manifest, const std::filesystem::path& path) {
  ordered_json subjects = ordered_json::array();
  for (const auto& s : manifest.subjects) {
    ordered_json tps = ordered_json::array();
    for (const auto& tp : s.timepoints) {
      ordered_json t = {{"t_index", tp.t_index}, {"volume_path", tp.volume_path.generic_string()}};
      if (tp.gt_count) t["gt_count"] = *tp.gt_count;
      tps.push_back(std::move(t));
    }
    subjects.push_back({{"subject_id", s.subject_id}, {"timepoints", std::move(tps)}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << ordered_json{{"subjects", std::move(subjects)}}.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

GroundTruth ground_truth(const LongitudinalManifest& manifest) {
  GroundTruth gt;
  for (const auto& s : manifest.subjects) {
    std::vector<int> row;
    for (const auto& tp : s.timepoints) {
      if (!tp.gt_count)
        throw InvalidArgument("subject '" + s.subject_id + "' timepoint " + std::to_string(tp.t_index) +
                              " has no gt_count");
      row.push_back(*tp.gt_count);
    }
    gt.push_back(std::move(row));
  }
  return gt;
}

CountTable build_count_table(const LongitudinalManifest& manifest, const std::vector<double>& grid,
                             const CountOptions& options) {
  require_increasing(grid, to_string(options.method));
  struct Job {
    std::size_t subject, timepoint;
  };
  std::vector<Job> jobs;
  CountTable table;
  table.theta_grid = grid;
  for (std::size_t i = 0; i < manifest.subjects.size(); ++i) {
    const auto& tps = manifest.subjects[i].timepoints;
    table.y.emplace_back(grid.size(), std::vector<int>(tps.size(), 0));
    std::vector<double> t_values;
    for (std::size_t t = 0; t < tps.size(); ++t) {
      jobs.push_back({i, t});
      t_values.push_back(tps[t].t_index);
    }
    table.t_values.push_back(std::move(t_values));
  }

  std::vector<std::exception_ptr> failures(jobs.size());
  auto run = [&](std::size_t k) {
    const Job& job = jobs[k];
    try {
      const Volume vol = load_volume(manifest.subjects[job.subject].timepoints[job.timepoint].volume_path);
      auto& rows = table.y[job.subject];
      if (options.method == Method::persistence) {
        const PersistenceDiagram pd = compute_persistence(vol, options.mask_eps, Exec::serial);
        for (std::size_t j = 0; j < grid.size(); ++j)
          rows[j][job.timepoint] = static_cast<int>(count_from_diagram(pd, grid[j]));
      } else {
        for (std::size_t j = 0; j < grid.size(); ++j)
          rows[j][job.timepoint] = static_cast<int>(direct_threshold_count(vol, grid[j]));
      }
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };

  const auto n = static_cast<std::int64_t>(jobs.size());
  if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k) run(static_cast<std::size_t>(k));
  } else {
    for (std::int64_t k = 0; k < n; ++k) run(static_cast<std::size_t>(k));
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return table;
}

std::string_view to_string(Mode m) noexcept { return m == Mode::supervised ? "supervised" : "unsupervised"; }

Mode parse_mode(std::string_view text) {
  if (text == "supervised") return Mode::supervised;
  if (text == "unsupervised") return Mode::unsupervised;
  throw InvalidArgument("unknown mode '" + std::string(text) + "'");
}

Selection supervised_select(const CountTable& table, const GroundTruth& gt,
                            const std::vector<std::size_t>& subjects) {
  check_table(table);
  check_gt(table, gt);
  const auto chosen = subjects.empty() ? all_subjects(table.subjects()) : subjects;
  std::vector<double> objective(table.theta_grid.size(), 0.0);
  for (std::size_t j = 0; j < objective.size(); ++j)
    for (std::size_t i : chosen)
      for (std::size_t t = 0; t < gt[i].size(); ++t) {
        const double r = static_cast<double>(gt[i][t]) - table.y[i][j][t];
        objective[j] += r * r;
      }
  return finish(table, std::move(objective));
}

Selection unsupervised_select(const CountTable& table, const std::vector<std::size_t>& subjects) {
  check_table(table);
  const auto chosen = subjects.empty() ? all_subjects(table.subjects()) : subjects;
  std::vector<double> objective(table.theta_grid.size(), 0.0);
  std::vector<double> series;
  for (std::size_t j = 0; j < objective.size(); ++j)
    for (std::size_t i : chosen) {
      const auto& row = table.y[i][j];
      series.assign(row.begin(), row.end());
      objective[j] += linear_fit(table.t_values[i], series).sse;
    }
  return finish(table, std::move(objective));
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 1) throw InvalidArgument("need at least one fold");
  if (n < folds)
    throw InvalidArgument("cannot split " + std::to_string(n) + " subjects into " + std::to_string(folds) + " folds");
  std::vector<std::size_t> order = all_subjects(n);
  // Fisher-Yates driven directly by mt19937_64 so the partition is the same
  // on every standard library.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < folds; ++k) {
    const std::size_t size = n / folds + (k < n % folds ? 1 : 0);
    out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out[k].begin(), out[k].end());
    pos += size;
  }
  return out;
}

CrossValidation cross_validate(const CountTable& table, const GroundTruth& gt, Mode mode, std::size_t folds,
                               std::uint64_t seed) {
  check_table(table);
  check_gt(table, gt);
  CrossValidation cv;
  cv.mode = mode;
  cv.folds = make_folds(table.subjects(), folds, seed);

  std::vector<std::size_t> case_offset(table.subjects() + 1, 0);
  for (std::size_t i = 0; i < table.subjects(); ++i) case_offset[i + 1] = case_offset[i] + gt[i].size();
  cv.case_errors.assign(case_offset.back(), 0.0);

  for (const auto& test : cv.folds) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < table.subjects(); ++i)
      if (!std::binary_search(test.begin(), test.end(), i)) train.push_back(i);
    // With a single fold there is nothing to train on; select on the test
    // subjects themselves.
    if (train.empty()) train = test;
    const Selection sel = mode == Mode::supervised ? supervised_select(table, gt, train)
                                                   : unsupervised_select(table, train);
    double sum = 0.0;
    std::size_t cases = 0;
    for (std::size_t i : test)
      for (std::size_t t = 0; t < gt[i].size(); ++t) {
        const double err = std::fabs(static_cast<double>(gt[i][t]) - table.y[i][sel.index][t]);
        cv.case_errors[case_offset[i] + t] = err;
        sum += err;
        ++cases;
      }
    cv.fold_thetas.push_back(sel.theta);
    cv.fold_maes.push_back(sum / static_cast<double>(cases));
  }
  double total = 0.0;
  for (double m : cv.fold_maes) total += m;
  cv.mean_mae = total / static_cast<double>(cv.fold_maes.size());
  return cv;
}

namespace {

MethodReport run_method(const LongitudinalManifest& manifest, const std::vector<double>& grid, Method method,
                        const CalibrationOptions& options, const GroundTruth* gt) {
  MethodReport r;
  r.method = method;
  r.grid = grid;
  const CountTable table = build_count_table(manifest, grid, {method, options.mask_eps, options.exec});
  r.selection = options.mode == Mode::supervised ? supervised_select(table, *gt) : unsupervised_select(table);
  if (gt) r.cv = cross_validate(table, *gt, options.mode, options.folds, options.seed);
  return r;
}

ordered_json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

ordered_json method_json(const MethodReport& r) {
  ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["theta_star"] = r.selection.theta;
  ordered_json objective = ordered_json::array();
  for (std::size_t k = 0; k < r.selection.objective.size(); ++k)
    objective.push_back({{"theta", r.grid[k]}, {"objective", r.selection.objective[k]}});
  j["objective_by_theta"] = std::move(objective);
  if (r.cv) {
    j["fold_thetas"] = r.cv->fold_thetas;
    j["fold_maes"] = r.cv->fold_maes;
    j["mean_mae"] = r.cv->mean_mae;
  } else {
    j["fold_thetas"] = ordered_json::array();
    j["fold_maes"] = ordered_json::array();
    j["mean_mae"] = nullptr;
  }
  return j;
}

}  // namespace

CalibrationReport calibrate(const LongitudinalManifest& manifest, const CalibrationOptions& options) {
  validate(manifest);
  const bool have_gt = manifest.has_ground_truth();
  if (options.mode == Mode::supervised && !have_gt)
    throw InvalidArgument("supervised calibration needs gt_count for every timepoint");
  if (options.compare_baseline && !have_gt)
    throw InvalidArgument("baseline comparison needs gt_count for every timepoint");
  if (have_gt && manifest.subjects.size() < options.folds)
    throw InvalidArgument("cannot split " + std::to_string(manifest.subjects.size()) + " subjects into " +
                          std::to_string(options.folds) + " folds");

  const GroundTruth gt = have_gt ? ground_truth(manifest) : GroundTruth{};
  const GroundTruth* gt_ptr = have_gt ? &gt : nullptr;

  CalibrationReport report;
  report.mode = options.mode;
  report.folds = options.folds;
  report.seed = options.seed;
  const auto grid = options.grid.empty() ? default_persistence_grid() : options.grid;
  report.persistence = run_method(manifest, grid, Method::persistence, options, gt_ptr);
  if (options.compare_baseline) {
    const auto baseline_grid = options.baseline_grid.empty() ? default_direct_grid() : options.baseline_grid;
    report.baseline = run_method(manifest, baseline_grid, Method::direct_threshold, options, gt_ptr);
    report.ttest = paired_ttest(report.persistence.cv->case_errors, report.baseline->cv->case_errors);
  }
  return report;
}

std::string report_to_json(const CalibrationReport& report) {
  ordered_json j;
  j["mode"] = std::string(to_string(report.mode));
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  const ordered_json persistence = method_json(report.persistence);
  for (const auto& [key, value] : persistence.items()) j[key] = value;
  if (report.baseline) j["baseline"] = method_json(*report.baseline);
  if (report.ttest)
    j["ttest"] = {{"t", number_or_string(report.ttest->t_statistic)},
                  {"p", number_or_string(report.ttest->p_value)},
                  {"baseline", "direct_threshold"}};
  return j.dump(2) + "\n";
}

}  // namespace pcount
