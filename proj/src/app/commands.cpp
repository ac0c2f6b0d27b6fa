#include "detect/app/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "detect/core/errors.hpp"
#include "detect/data/nrs_io.hpp"
#include "detect/data/preprocess.hpp"
#include "detect/data/recording_io.hpp"
#include "detect/data/text.hpp"
#include "detect/data/window_cache.hpp"
#include "detect/model/bundle_io.hpp"

namespace detect::app {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + file.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

bool is_window_cache(const fs::path& path) {
  return fs::is_regular_file(path) && path.extension() != ".csv";
}

void log_warnings(const std::vector<std::string>& warnings, std::ostream& log) {
  for (const auto& w : warnings) log << "WARNING " << w << '\n';
}

std::string pct(double v) { return data::format_fixed(v, 2); }

}  // namespace

RunConfig resolve_config(const CommonOptions& options) {
  RunConfig config = options.config ? load_run_config(*options.config) : RunConfig{};
  for (const auto& kv : options.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + kv + "' is not of the form key=value");
    }
    config.set(data::trim_space(std::string_view(kv).substr(0, eq)),
               std::string_view(kv).substr(eq + 1));
  }
  if (options.seed) config.seed = *options.seed;
  if (options.epochs) config.epochs = *options.epochs;
  config.validate();
  return config;
}

sim::Manifest cmd_simulate(const std::optional<fs::path>& spec_file, std::uint64_t seed,
                           const fs::path& out, std::ostream& log) {
  const sim::CohortSpec spec =
      spec_file ? sim::load_cohort_spec(*spec_file) : sim::default_cohort_spec(seed);
  const auto manifest = sim::generate_cohort(spec, out);
  std::ostringstream digest;
  digest << std::hex << manifest.digest();
  log << "simulated patients=" << spec.profiles.size()
      << " files=" << manifest.entries.size() << " manifest=" << digest.str() << '\n';
  return manifest;
}

data::WindowSet cmd_preprocess(const fs::path& data_path, std::optional<data::Phase> phase,
                               const RunConfig& config, const fs::path& out,
                               std::ostream& log) {
  auto recordings = data::load_recordings(data_path);
  if (phase) {
    std::erase_if(recordings, [&](const auto& r) { return r.phase != *phase; });
  }
  if (recordings.empty()) throw IngestionError("no recordings found in " + data_path.string());
  auto result = data::build_window_set(recordings, config.preprocess);
  log_warnings(result.warnings, log);
  data::save_window_set(result.windows, out);
  const auto counts = data::class_counts(result.windows);
  log << "preprocessed recordings=" << recordings.size()
      << " windows=" << result.windows.size();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    log << ' ' << result.windows.class_names[c] << '=' << counts[c];
  }
  log << '\n';
  return std::move(result.windows);
}

std::vector<TrainResult> cmd_train(const fs::path& data_path, const RunConfig& config,
                                   const fs::path& out, std::ostream& log) {
  data::WindowSet pre;
  if (is_window_cache(data_path)) {
    const auto cached = data::load_window_set(data_path);
    if (cached.normalized) {
      throw PreprocessError("window cache " + data_path.string() +
                            " is already normalized; training needs raw windows");
    }
    pre = data::filter(cached, [](const data::Window& w) {
      return w.source.phase == data::Phase::pre;
    });
  } else {
    const auto recordings = data::load_recordings(data_path);
    auto prepared = phase_windows(recordings, data::Phase::pre, config);
    log_warnings(prepared.warnings, log);
    pre = std::move(prepared.windows);
  }

  std::size_t fold = 0;
  auto on_epoch = [&](const model::EpochReport& r) {
    log << "EPOCH fold=" << fold << " epoch=" << r.epoch << '/' << config.epochs
        << " loss=" << data::format_fixed(r.loss, 6)
        << " train_acc=" << pct(r.train_accuracy) << " val_acc="
        << (r.val_accuracy ? pct(*r.val_accuracy) : std::string("na"))
        << " lr=" << data::format_exact(r.learning_rate) << '\n';
    log.flush();
    return true;
  };

  std::vector<TrainResult> results;
  if (config.split_mode == SplitMode::holdout) {
    results = train_pre_treatment(pre, config, on_epoch);
  } else {
    // Fold by fold so the log can name the fold.
    const auto counts = data::class_counts(pre);
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) {
        throw PreprocessError("class '" + pre.class_names[c] +
                              "' has no pre-treatment windows");
      }
    }
    for (const auto& split : data::kfold(pre, config.folds, config.seed)) {
      results.push_back(train_on_split(split, config, on_epoch));
      ++fold;
    }
  }

  double mean_val = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    log << "RESULT fold=" << i << " train_windows=" << r.train_windows
        << " val_windows=" << r.val_windows << " val_acc=" << pct(r.val_accuracy) << '\n';
    mean_val += r.val_accuracy;
  }
  if (results.size() > 1) {
    log << "RESULT mean_val_acc=" << pct(mean_val / static_cast<double>(results.size()))
        << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
      model::save_bundle(results[i].bundle, fs::path(out.string() + ".fold" + std::to_string(i)));
    }
  }
  model::save_bundle(results.front().bundle, out);
  return results;
}

void write_report_files(const eval::CohortReport& report, const fs::path& dir) {
  ensure_directory(dir);
  write_text(dir / kReportCsv, eval::render_report_csv(report));
  write_text(dir / kSummaryCsv, eval::render_summary_csv(report));
  write_text(dir / kReportMarkdown, eval::render_markdown(report));
}

eval::CohortReport cmd_evaluate(const fs::path& bundle_file, const fs::path& data_path,
                                const fs::path& nrs_file, const RunConfig& config,
                                const fs::path& out, std::ostream& log) {
  const auto bundle = model::load_bundle(bundle_file);
  const auto nrs = data::read_nrs_table(nrs_file);
  const auto recordings = data::load_recordings(data_path);
  auto prepared = data::build_window_set(recordings, config.preprocess);
  std::vector<std::string> warnings = std::move(prepared.warnings);
  if (prepared.windows.window_length != bundle.config.seq_len) {
    throw ConfigError("window length " + std::to_string(prepared.windows.window_length) +
                      " does not match the model's " +
                      std::to_string(bundle.config.seq_len));
  }
  const auto accuracies = measure_patients(bundle, prepared.windows, warnings);
  for (const auto& a : accuracies) {
    log << "PATIENT id=" << a.patient_id << " pre_windows=" << a.pre_windows
        << " post_windows=" << a.post_windows << " acc_pre=" << pct(a.acc_pre)
        << " acc_post=" << pct(a.acc_post) << '\n';
  }
  auto report = assemble_report(accuracies, nrs, config.nrs_predicate, std::move(warnings));
  log_warnings(report.warnings, log);
  write_report_files(report, out);
  log << "REPORT threshold=" << pct(report.tes_threshold)
      << " consistency=" << pct(report.consistency_rate) << '\n';
  return report;
}

eval::CohortReport cmd_report(const fs::path& outcomes_file, const RunConfig& config,
                              const fs::path& out, std::ostream& log) {
  std::ifstream in(outcomes_file);
  if (!in) throw IngestionError("cannot open " + outcomes_file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto report = eval::build_report(eval::parse_outcomes_csv(buffer.str(), config.nrs_predicate));
  log_warnings(report.warnings, log);
  write_report_files(report, out);
  log << "REPORT threshold=" << pct(report.tes_threshold)
      << " consistency=" << pct(report.consistency_rate) << '\n';
  return report;
}

}  // namespace detect::app
