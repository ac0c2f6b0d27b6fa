#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "detect/app/commands.hpp"
#include "detect/core/errors.hpp"
#include "detect/core/tensor.hpp"

namespace {

namespace fs = std::filesystem;
using detect::app::CommonOptions;

void add_common(CLI::App& cmd, CommonOptions& common, std::string& out,
                const std::string& out_help) {
  cmd.add_option("--seed", common.seed, "Master random seed (default 42)");
  cmd.add_option("--config", common.config, "Run config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--out", out, out_help)->required();
  cmd.add_option("--set", common.overrides, "Config override key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment-effect detection from activity recognition on IMU data"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string out;
  std::string data_path;
  std::string spec_file;
  std::string phase_text = "all";
  std::string bundle_file;
  std::string nrs_file;
  std::string outcomes_file;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort");
  add_common(*simulate, common, out, "Output directory");
  simulate->add_option("--spec", spec_file, "Cohort spec file (default: built-in cohort)")
      ->check(CLI::ExistingFile);

  auto* preprocess = app.add_subcommand("preprocess", "Trim and window recordings into a cache");
  add_common(*preprocess, common, out, "Window cache file to write");
  preprocess->add_option("--data", data_path, "Recording CSV file or directory")->required();
  preprocess->add_option("--phase", phase_text, "pre, post or all")
      ->check(CLI::IsMember({"pre", "post", "all"}));

  auto* train = app.add_subcommand("train", "Train the activity classifier on pre-treatment data");
  add_common(*train, common, out, "Bundle file to write");
  train->add_option("--data", data_path, "Recording directory, CSV file or window cache")
      ->required();
  train->add_option("--epochs", common.epochs, "Override the epoch count");

  auto* evaluate = app.add_subcommand("evaluate", "Per-patient TES, threshold and flags");
  add_common(*evaluate, common, out, "Report directory");
  evaluate->add_option("--bundle", bundle_file, "Trained bundle")->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--data", data_path, "Recording directory")->required();
  evaluate->add_option("--nrs", nrs_file, "NRS table (default: <data>/nrs.csv)");

  auto* report = app.add_subcommand("report", "Decision layer over given per-patient accuracies");
  add_common(*report, common, out, "Report directory");
  report->add_option("--outcomes", outcomes_file,
                     "CSV with patient_id,acc_pre,acc_post,nrs_pre,nrs_post")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = detect::app::resolve_config(common);
    auto& log = std::cout;
    if (simulate->parsed()) {
      std::optional<fs::path> spec;
      if (!spec_file.empty()) spec = fs::path(spec_file);
      detect::app::cmd_simulate(spec, config.seed, out, log);
    } else if (preprocess->parsed()) {
      std::optional<detect::data::Phase> phase;
      if (phase_text != "all") phase = detect::data::parse_phase(phase_text);
      detect::app::cmd_preprocess(data_path, phase, config, out, log);
    } else if (train->parsed()) {
      detect::core::tune_allocator_for_training();
      detect::app::cmd_train(data_path, config, out, log);
    } else if (evaluate->parsed()) {
      const fs::path nrs = nrs_file.empty() ? fs::path(data_path) / "nrs.csv" : fs::path(nrs_file);
      detect::app::cmd_evaluate(bundle_file, data_path, nrs, config, out, log);
    } else if (report->parsed()) {
      detect::app::cmd_report(outcomes_file, config, out, log);
    }
  } catch (const detect::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
