#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "detect/app/pipeline.hpp"
#include "detect/app/run_config.hpp"
#include "detect/eval/detect.hpp"
#include "detect/sim/generator.hpp"

namespace detect::app {

/// Flags shared by every subcommand. Precedence, lowest first: built-in
/// defaults, the config file, `overrides` (`key=value`), then the dedicated
/// flags (`seed`, `epochs`).
struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;
  std::optional<std::size_t> epochs;
};

RunConfig resolve_config(const CommonOptions& options);

/// Default cohort (seeded with `seed`) unless a spec file is given.
sim::Manifest cmd_simulate(const std::optional<std::filesystem::path>& spec_file,
                           std::uint64_t seed, const std::filesystem::path& out,
                           std::ostream& log);

/// Trims and segments recordings into an un-normalized window cache.
/// `phase` restricts the output to one phase.
data::WindowSet cmd_preprocess(const std::filesystem::path& data_path,
                               std::optional<data::Phase> phase,
                               const RunConfig& config,
                               const std::filesystem::path& out, std::ostream& log);

/// Trains on the pre-treatment windows of `data_path` (a recording
/// directory, a single CSV, or a window cache) and saves the bundle to
/// `out`; with k folds the bundles go to `out.fold<i>` and `out` holds fold 0.
/// Each epoch logs one line:
///   EPOCH fold=<i> epoch=<e>/<E> loss=<..> train_acc=<..> val_acc=<..> lr=<..>
std::vector<TrainResult> cmd_train(const std::filesystem::path& data_path,
                                   const RunConfig& config,
                                   const std::filesystem::path& out,
                                   std::ostream& log);

/// Per-patient accuracies, decision layer and report files in `out`.
eval::CohortReport cmd_evaluate(const std::filesystem::path& bundle_file,
                                const std::filesystem::path& data_path,
                                const std::filesystem::path& nrs_file,
                                const RunConfig& config,
                                const std::filesystem::path& out, std::ostream& log);

/// Decision layer over a CSV of per-patient accuracies and NRS scores
/// (columns patient_id, acc_pre, acc_post, nrs_pre, nrs_post).
eval::CohortReport cmd_report(const std::filesystem::path& outcomes_file,
                              const RunConfig& config,
                              const std::filesystem::path& out, std::ostream& log);

inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kReportMarkdown = "report.md";

/// Writes report.csv, summary.csv and report.md into `dir`.
void write_report_files(const eval::CohortReport& report,
                        const std::filesystem::path& dir);

}  // namespace detect::app
