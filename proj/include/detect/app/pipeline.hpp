#pragma once

#include <optional>
#include <string>
#include <vector>

#include "detect/app/run_config.hpp"
#include "detect/data/nrs_io.hpp"
#include "detect/data/types.hpp"
#include "detect/eval/detect.hpp"
#include "detect/model/trainer.hpp"
#include "detect/model/transformer.hpp"

namespace detect::app {

/// Un-normalized windows of every recording in `phase`, with warnings for
/// recordings that were too short.
data::PreprocessResult phase_windows(const std::vector<data::SensorRecording>& recordings,
                                     data::Phase phase, const RunConfig& config);

struct TrainResult {
  model::ClassifierBundle bundle;
  std::vector<model::EpochReport> epochs;
  double val_accuracy = 0.0;  // percent, eval mode, after the last epoch
  std::size_t train_windows = 0;
  std::size_t val_windows = 0;
};

/// Splits `pre` (un-normalized), fits normalization on the training part,
/// trains a fresh model and records the held-out window keys in the bundle.
/// Throws PreprocessError when a class has no windows at all.
TrainResult train_on_split(const data::SplitResult& split, const RunConfig& config,
                           const model::EpochCallback& on_epoch = {});

/// holdout: one result; kfold: one result per fold.
std::vector<TrainResult> train_pre_treatment(const data::WindowSet& pre,
                                             const RunConfig& config,
                                             const model::EpochCallback& on_epoch = {});

struct PatientAccuracy {
  std::string patient_id;
  double acc_pre = 0.0;
  double acc_post = 0.0;
  std::size_t pre_windows = 0;
  std::size_t post_windows = 0;
};

/// Per-patient accuracy on the bundle's held-out pre-treatment windows and
/// on every post-treatment window, in patient-id order. Patients with no
/// held-out key fall back to all their pre-treatment windows (a warning
/// is appended). Patients lacking either phase are skipped with a warning.
std::vector<PatientAccuracy> measure_patients(const model::ClassifierBundle& bundle,
                                              const data::WindowSet& windows,
                                              std::vector<std::string>& warnings);

/// Joins accuracies with NRS scores and runs the decision layer. Patients
/// without an NRS entry are listed in `excluded_patients`.
eval::CohortReport assemble_report(const std::vector<PatientAccuracy>& accuracies,
                                   const std::vector<data::NrsEntry>& nrs,
                                   eval::NrsPredicate predicate,
                                   std::vector<std::string> warnings = {});

}  // namespace detect::app
