// Acceptance suite: one PASS / FAIL / NOT RUN line per criterion.
// Exits nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "detect/app/pipeline.hpp"
#include "detect/core/loss.hpp"
#include "detect/core/ops.hpp"
#include "detect/core/tensor.hpp"
#include "detect/data/benchmark.hpp"
#include "detect/data/nrs_io.hpp"
#include "detect/data/preprocess.hpp"
#include "detect/data/recording_io.hpp"
#include "detect/eval/detect.hpp"
#include "detect/model/trainer.hpp"
#include "detect/sim/generator.hpp"
#include "fixtures.hpp"
#include "grad_cases.hpp"
#include "gradcheck.hpp"

namespace detect::acceptance {
namespace {

namespace fs = std::filesystem;

// Full-cohort training is about 20 s per epoch on one core, so the 100-epoch
// recipe does not fit the time budget. Validation accuracy saturates within
// a few epochs on the synthetic cohort.
constexpr std::size_t kEndToEndEpochs = 8;
constexpr std::size_t kDeterminismEpochs = 2;
constexpr double kTimeBudgetS = 600.0;

enum class Status { pass, fail, not_run };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_.empty()) return {Status::pass, summary};
    std::string detail = summary + "; failed:";
    for (const auto& f : failures_) detail += " [" + f + "]";
    return {Status::fail, detail};
  }

 private:
  std::vector<std::string> failures_;
};

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string scientific(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome gradient_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Checks checks;
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& c : testing::grad_cases()) {
    for (int seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(5000 + seed);
      const auto gc = c.make(rng);
      const auto result = testing::check_gradients(gc.loss, gc.inputs, 1e-5);
      worst = std::max(worst, result.max_relative_error);
      ++checked;
      checks.expect(result.ok(1e-4), c.name + " seed " + std::to_string(seed) +
                                         " rel err " + std::to_string(result.max_relative_error));
    }
  }
  const double elapsed = seconds_since(start);
  checks.expect(elapsed < 60.0, "runtime " + fmt(elapsed, 1) + " s");
  return checks.outcome(std::to_string(testing::grad_cases().size()) + " cases x 20 seeds (" +
                        std::to_string(checked) + " checks), worst rel err " +
                        scientific(worst) + ", " + fmt(elapsed, 1) + " s");
}

Outcome loss_sanity() {
  Checks checks;
  const auto bundle = model::init_params({});
  std::mt19937_64 rng(2024);
  const auto batch = testing::random_tensor({32, 100, 6}, rng);
  std::vector<core::ClassIndex> labels;
  for (int i = 0; i < 32; ++i) labels.push_back(static_cast<core::ClassIndex>(rng() % 3));
  core::NoGradGuard guard;
  const double initial = core::smoothed_cross_entropy_from_logits(
                             model::forward(bundle, batch, false), labels, 0.1)
                             .item();
  const double ln3 = std::log(3.0);
  checks.expect(std::abs(initial - ln3) <= 0.05 * ln3, "initial loss " + fmt(initial, 5));

  const auto probs = core::Tensor::from_values({1, 3}, {0.8, 0.1, 0.1});
  const std::vector<core::ClassIndex> label = {0};
  const double hand = core::smoothed_cross_entropy(probs, label, 0.1);
  checks.expect(std::abs(hand - 0.36178) <= 1e-5, "hand case " + fmt(hand, 6));
  return checks.outcome("initial loss " + fmt(initial, 4) + " vs ln 3 " + fmt(ln3, 4) +
                        ", hand case " + fmt(hand, 5));
}

Outcome table_reproduction() {
  const auto start = std::chrono::steady_clock::now();
  struct Row {
    const char* id;
    double acc_pre, acc_post;
    int nrs_pre, nrs_post;
    double tes;
    bool sig_nrs, sig_detect;
  };
  constexpr Row kRows[] = {
      {"12345", 98.61, 87.33, 5, 1, 11.28, true, true},
      {"21000", 98.61, 82.81, 6, 2, 15.80, true, true},
      {"31000", 97.05, 92.88, 5, 5, 4.17, false, false},
      {"41000", 98.98, 86.22, 7, 4, 12.76, true, true},
      {"51000", 97.80, 89.12, 3, 2, 8.69, false, false},
      {"61000", 96.94, 82.31, 5, 3, 14.63, true, true},
      {"71000", 97.96, 96.94, 2, 0, 1.02, true, false},
      {"91000", 98.26, 93.75, 4, 3, 4.51, false, false},
  };
  // Reference cells are rounded to two decimals; the extra 1e-9 absorbs
  // binary rounding of differences that are exactly 0.01.
  constexpr double kTol = 0.01 + 1e-9;
  Checks checks;
  std::vector<eval::PatientOutcome> outcomes;
  for (const auto& r : kRows) {
    outcomes.push_back(eval::make_outcome(r.id, r.acc_pre, r.acc_post, r.nrs_pre, r.nrs_post));
  }
  const auto report = eval::build_report(outcomes);
  for (std::size_t i = 0; i < std::size(kRows); ++i) {
    const auto& o = report.outcomes[i];
    const auto& r = kRows[i];
    checks.expect(std::abs(o.tes - r.tes) <= kTol, std::string(r.id) + " tes " + fmt(o.tes, 4));
    checks.expect(o.sig_nrs == r.sig_nrs, std::string(r.id) + " sig_nrs");
    checks.expect(o.sig_detect == r.sig_detect, std::string(r.id) + " sig_detect");
  }
  checks.expect(std::abs(report.tes_threshold - 11.10) <= kTol,
                "threshold " + fmt(report.tes_threshold, 4));
  checks.expect(std::abs(report.consistency_rate - 87.50) <= kTol,
                "consistency " + fmt(report.consistency_rate, 4));

  struct Cells {
    const char* column;
    double mean, sd, lo, hi;
  };
  constexpr Cells kSummary[] = {
      {"acc_pre", 98.03, 0.74, 97.52, 98.54}, {"acc_post", 88.92, 5.27, 85.27, 92.57},
      {"tes", 9.11, 5.40, 5.37, 12.85},       {"nrs_pre", 4.63, 1.60, 3.52, 5.74},
      {"nrs_post", 2.50, 1.60, 1.39, 3.61},
  };
  checks.expect(report.summary.size() == std::size(kSummary), "summary columns");
  for (std::size_t i = 0; i < std::min(report.summary.size(), std::size(kSummary)); ++i) {
    const auto& s = report.summary[i];
    const auto& e = kSummary[i];
    const std::string c = e.column;
    checks.expect(s.column == c, "column " + s.column);
    checks.expect(std::abs(s.mean - e.mean) <= kTol, c + " mean " + fmt(s.mean, 4));
    checks.expect(std::abs(s.sd - e.sd) <= kTol, c + " sd " + fmt(s.sd, 4));
    checks.expect(std::abs(s.ci_low - e.lo) <= kTol, c + " ci_low " + fmt(s.ci_low, 4));
    checks.expect(std::abs(s.ci_high - e.hi) <= kTol, c + " ci_high " + fmt(s.ci_high, 4));
  }
  const double elapsed = seconds_since(start);
  checks.expect(elapsed < 1.0, "runtime " + fmt(elapsed, 3) + " s");
  return checks.outcome("threshold " + fmt(report.tes_threshold) + ", consistency " +
                        fmt(report.consistency_rate) + "%, 8 rows and 25 summary cells within 0.01");
}

std::size_t closed_form_windows(std::size_t samples, double rate) {
  const auto trim = static_cast<std::size_t>(std::llround(2.5 * rate));
  if (samples <= 2 * trim) return 0;
  const std::size_t kept = samples - 2 * trim;
  return kept < 100 ? 0 : (kept - 100) / 50 + 1;
}

Outcome preprocessing_arithmetic() {
  Checks checks;
  const auto trial = sim::generate_recording(sim::default_cohort_spec().profiles[0],
                                             data::Phase::pre, data::Activity::walk,
                                             data::Placement::nondominant_hand, 0);
  const auto trimmed = data::trim(trial);
  const auto windows = data::segment(trimmed);
  checks.expect(trimmed.samples.size() == 2500, "trimmed " + std::to_string(trimmed.samples.size()));
  checks.expect(windows.size() == 49, "windows " + std::to_string(windows.size()));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> duration(5.5, 120.0);
  const double rates[] = {20.0, 50.0, 64.0, 100.0, 128.0, 200.0};
  constexpr int kCases = 500;
  for (int i = 0; i < kCases; ++i) {
    const double rate = rates[rng() % std::size(rates)];
    const auto samples = static_cast<std::size_t>(std::llround(duration(rng) * rate));
    const auto rec = testing::ramp_recording(samples, rate);
    const auto result = data::build_window_set({rec});
    const std::size_t expected = closed_form_windows(samples, rate);
    if (result.windows.size() != expected) {
      checks.expect(false, std::to_string(samples) + " samples @" + fmt(rate, 0) + " Hz: " +
                               std::to_string(result.windows.size()) + " != " +
                               std::to_string(expected));
    }
  }
  return checks.outcome("30 s @100 Hz -> " + std::to_string(trimmed.samples.size()) +
                        " samples -> " + std::to_string(windows.size()) + " windows; " +
                        std::to_string(kCases) + " random duration/rate cases match closed form");
}

// ---------------------------------------------------------------------------

std::vector<data::SensorRecording> post_recordings(const sim::CohortSpec& spec,
                                                   std::optional<double> effect,
                                                   int trial_offset = 0) {
  std::vector<data::SensorRecording> out;
  for (auto profile : spec.profiles) {
    if (effect) profile.effect_size = *effect;
    for (const auto activity : spec.activities) {
      for (const auto placement : spec.placements) {
        for (int t = 0; t < spec.trials_per_condition; ++t) {
          out.push_back(sim::generate_recording(profile, data::Phase::post, activity, placement,
                                                trial_offset + t, spec.trial_duration_s,
                                                spec.rate_hz));
        }
      }
    }
  }
  return out;
}

std::vector<app::PatientAccuracy> accuracies_with_post(
    const model::ClassifierBundle& bundle, const std::vector<data::SensorRecording>& pre,
    const std::vector<data::SensorRecording>& post) {
  auto all = pre;
  all.insert(all.end(), post.begin(), post.end());
  std::vector<std::string> warnings;
  return app::measure_patients(bundle, data::build_window_set(all).windows, warnings);
}

Outcome end_to_end(std::vector<std::string>& extra_lines) {
  const auto start = std::chrono::steady_clock::now();
  Checks checks;
  testing::TempDir dir;
  const auto spec = sim::default_cohort_spec(42);
  sim::generate_cohort(spec, dir.path());
  auto recordings = data::load_recordings(dir.path());
  const auto nrs = data::read_nrs_table(dir.path() / "nrs.csv");

  app::RunConfig config;
  config.epochs = kEndToEndEpochs;
  const auto pre = app::phase_windows(recordings, data::Phase::pre, config).windows;
  core::tune_allocator_for_training();
  const auto results = app::train_pre_treatment(pre, config);
  const auto& bundle = results.front().bundle;
  const double val_acc = results.front().val_accuracy;
  const double train_s = seconds_since(start);
  checks.expect(val_acc >= 95.0, "validation accuracy " + fmt(val_acc));

  std::vector<std::string> warnings;
  const auto accuracies =
      app::measure_patients(bundle, data::build_window_set(recordings).windows, warnings);
  const auto report = app::assemble_report(accuracies, nrs, config.nrs_predicate, warnings);

  std::map<std::string, double> effect_of;
  for (const auto& p : spec.profiles) effect_of[p.patient_id] = p.effect_size;
  std::size_t nulls = 0, strong = 0;
  for (const auto& o : report.outcomes) {
    const double e = effect_of.at(o.patient_id);
    if (e == 0.0) {
      ++nulls;
      checks.expect(!o.sig_detect, o.patient_id + " (effect 0) flagged, tes " + fmt(o.tes));
    }
    if (e >= 2.0) {
      ++strong;
      checks.expect(o.tes > report.tes_threshold,
                    o.patient_id + " (effect 2) tes " + fmt(o.tes) + " <= threshold " +
                        fmt(report.tes_threshold));
    }
  }

  // Pre recordings do not depend on the effect size, so one model serves
  // every effect level.
  std::vector<data::SensorRecording> pre_recordings;
  for (const auto& r : recordings) {
    if (r.phase == data::Phase::pre) pre_recordings.push_back(r);
  }
  recordings.clear();
  std::vector<double> mean_tes;
  std::string curve;
  for (const double effect : {0.0, 0.5, 1.0, 2.0}) {
    const auto acc = accuracies_with_post(bundle, pre_recordings, post_recordings(spec, effect));
    double total = 0.0;
    for (const auto& a : acc) total += eval::compute_tes(a.acc_pre, a.acc_post);
    mean_tes.push_back(total / static_cast<double>(acc.size()));
    curve += (curve.empty() ? "" : " ") + fmt(effect, 1) + ":" + fmt(mean_tes.back());
  }
  for (std::size_t i = 1; i < mean_tes.size(); ++i) {
    checks.expect(mean_tes[i] >= mean_tes[i - 1], "cohort-mean TES decreases at step " +
                                                      std::to_string(i));
  }
  const double elapsed = seconds_since(start);
  checks.expect(elapsed < kTimeBudgetS, "runtime " + fmt(elapsed, 0) + " s");

  // Null patients under fresh post-treatment draws against the same threshold.
  constexpr int kDraws = 20;
  std::size_t null_cases = 0, null_quiet = 0;
  for (const auto& o : report.outcomes) {
    if (effect_of.at(o.patient_id) != 0.0) continue;
    sim::CohortSpec single = spec;
    single.profiles.erase(
        std::remove_if(single.profiles.begin(), single.profiles.end(),
                       [&](const auto& p) { return p.patient_id != o.patient_id; }),
        single.profiles.end());
    for (int draw = 1; draw <= kDraws; ++draw) {
      const auto post = data::build_window_set(
          post_recordings(single, std::nullopt, draw * spec.trials_per_condition));
      const auto normalized = data::apply_norm(post.windows, *bundle.norm_stats);
      const double acc_post = eval::patient_accuracy(bundle, normalized);
      const double tes = eval::compute_tes(o.acc_pre, acc_post);
      ++null_cases;
      null_quiet += tes >= report.tes_threshold ? 0 : 1;
    }
  }
  const double quiet_rate = 100.0 * static_cast<double>(null_quiet) /
                            static_cast<double>(std::max<std::size_t>(null_cases, 1));
  const bool null_ok = null_cases > 0 && quiet_rate >= 95.0;
  extra_lines.push_back(std::string(null_ok ? "PASS" : "FAIL") +
                        " [5b] null-effect property: sig_detect false in " +
                        std::to_string(null_quiet) + "/" + std::to_string(null_cases) +
                        " fresh post-treatment draws (" + fmt(quiet_rate, 1) +
                        "%, need >= 95%)");

  return checks.outcome(
      std::to_string(kEndToEndEpochs) + " epochs, val acc " + fmt(val_acc) + "% (train " +
      fmt(train_s, 0) + " s, total " + fmt(elapsed, 0) + " s); threshold " +
      fmt(report.tes_threshold) + ", " + std::to_string(nulls) + " null patients not flagged, " +
      std::to_string(strong) + " effect-2 patients above threshold; cohort-mean TES by effect " +
      curve);
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
  const std::string command = std::string("\"") + DETECT_CLI_PATH + "\" " + args + " > \"" +
                              log.string() + "\" 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Checks checks;
  testing::TempDir dir;
  std::vector<std::string> reports;
  for (const std::string run : {"run1", "run2"}) {
    const auto root = dir.path() / run;
    fs::create_directories(root);
    const auto data = root / "data";
    const auto bundle = root / "model.bin";
    const auto out = root / "report";
    const auto log = root / "log.txt";
    const std::string seed = " --seed 42";
    checks.expect(run_cli("simulate" + seed + " --out \"" + data.string() + "\"", log) == 0,
                  run + " simulate");
    checks.expect(run_cli("train" + seed + " --epochs " + std::to_string(kDeterminismEpochs) +
                              " --data \"" + data.string() + "\" --out \"" + bundle.string() + "\"",
                          log) == 0,
                  run + " train");
    checks.expect(run_cli("evaluate" + seed + " --bundle \"" + bundle.string() + "\" --data \"" +
                              data.string() + "\" --out \"" + out.string() + "\"",
                          log) == 0,
                  run + " evaluate");
    reports.push_back(read_file(out / "report.csv") + read_file(out / "summary.csv") +
                      read_file(out / "report.md"));
  }
  checks.expect(!reports[0].empty(), "empty report");
  checks.expect(reports[0] == reports[1], "report bytes differ");
  checks.expect(read_file(dir.path() / "run1" / "model.bin") ==
                    read_file(dir.path() / "run2" / "model.bin"),
                "bundle bytes differ");
  return checks.outcome("two CLI runs (simulate, train " + std::to_string(kDeterminismEpochs) +
                        " epochs, evaluate) give identical report and bundle bytes (" +
                        std::to_string(reports[0].size()) + " report bytes)");
}

// ---------------------------------------------------------------------------

std::size_t env_epochs() {
  if (const char* e = std::getenv("DETECT_BENCHMARK_EPOCHS")) {
    return static_cast<std::size_t>(std::max(1L, std::strtol(e, nullptr, 10)));
  }
  return app::RunConfig{}.epochs;
}

Outcome benchmarks() {
  const char* kuhar = std::getenv("DETECT_KUHAR_DIR");
  const char* imu = std::getenv("DETECT_IMU_DIR");
  if (!kuhar && !imu) {
    return {Status::not_run,
            "set DETECT_KUHAR_DIR (100 Hz) and/or DETECT_IMU_DIR (50 Hz) to run"};
  }
  Checks checks;
  std::string summary;
  app::RunConfig config;
  config.epochs = env_epochs();
  if (kuhar) {
    const auto windows = app::phase_windows(data::load_benchmark_directory(kuhar, 100.0),
                                            data::Phase::pre, config)
                             .windows;
    const auto results = app::train_pre_treatment(windows, config);
    const double acc = results.front().val_accuracy;
    checks.expect(acc >= 95.0, "KU-HAR test accuracy " + fmt(acc));
    summary += "KU-HAR holdout accuracy " + fmt(acc) + "% ";
  }
  if (imu) {
    auto kfold = config;
    kfold.split_mode = app::SplitMode::kfold;
    kfold.folds = 5;
    const auto windows = app::phase_windows(data::load_benchmark_directory(imu, 50.0),
                                            data::Phase::pre, kfold)
                             .windows;
    const auto results = app::train_pre_treatment(windows, kfold);
    double mean = 0.0;
    for (const auto& r : results) mean += r.val_accuracy;
    mean /= static_cast<double>(results.size());
    checks.expect(mean >= 95.0, "IMU 5-fold accuracy " + fmt(mean));
    summary += "IMU 5-fold mean accuracy " + fmt(mean) + "% ";
  }
  return checks.outcome(summary + "(" + std::to_string(config.epochs) + " epochs)");
}

Outcome overfit_smoke() {
  constexpr std::size_t kWindows = 64;
  constexpr std::size_t kMaxEpochs = 200;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  data::WindowSet raw;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < kWindows; ++i) labels.push_back(i % 3);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (std::size_t i = 0; i < kWindows; ++i) {
    data::Window w;
    w.label = labels[i];
    w.source.patient_id = "toy";
    w.source.activity = data::kAllActivities[w.label];
    w.source.trial = static_cast<int>(i);
    w.values.resize(raw.window_length * data::kChannels);
    for (double& v : w.values) v = normal(rng);
    raw.windows.push_back(std::move(w));
  }
  const auto train = data::apply_norm(raw, data::fit_norm_stats(raw));
  app::RunConfig config;
  config.epochs = kMaxEpochs;
  auto bundle = model::init_params(config.model_config());
  std::size_t reached = 0;
  double best = 0.0;
  model::train_classifier(bundle, train, nullptr, config.train_options(),
                          [&](const model::EpochReport& r) {
                            best = std::max(best, model::accuracy_percent(bundle, train));
                            if (best == 100.0) {
                              reached = r.epoch;
                              return false;
                            }
                            return true;
                          });
  Checks checks;
  checks.expect(reached > 0, "best training accuracy " + fmt(best));
  return checks.outcome("64 random windows with random labels memorized at epoch " +
                        std::to_string(reached) + " of at most " + std::to_string(kMaxEpochs));
}

// ---------------------------------------------------------------------------

const char* label(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::not_run: return "NOT RUN";
  }
  return "FAIL";
}

int run_all() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome(std::vector<std::string>&)> run;
  };
  const Criterion criteria[] = {
      {1, "gradient oracle", [](auto&) { return gradient_oracle(); }},
      {2, "loss sanity", [](auto&) { return loss_sanity(); }},
      {3, "pilot table reproduction", [](auto&) { return table_reproduction(); }},
      {4, "preprocessing arithmetic", [](auto&) { return preprocessing_arithmetic(); }},
      {5, "end-to-end synthetic pipeline", [](auto& extra) { return end_to_end(extra); }},
      {6, "determinism", [](auto&) { return determinism(); }},
      {7, "public benchmarks", [](auto&) { return benchmarks(); }},
      {8, "overfit smoke test", [](auto&) { return overfit_smoke(); }},
  };
  bool failed = false;
  for (const auto& c : criteria) {
    std::vector<std::string> extra;
    Outcome outcome;
    try {
      outcome = c.run(extra);
    } catch (const std::exception& e) {
      outcome = {Status::fail, std::string("exception: ") + e.what()};
    }
    failed |= outcome.status == Status::fail;
    std::cout << label(outcome.status) << " [" << c.id << "] " << c.name << ": "
              << outcome.detail << std::endl;
    for (const auto& line : extra) {
      failed |= line.starts_with("FAIL");
      std::cout << line << std::endl;
    }
  }
  return failed ? 1 : 0;
}

}  // namespace
}  // namespace detect::acceptance

int main() { return detect::acceptance::run_all(); }
