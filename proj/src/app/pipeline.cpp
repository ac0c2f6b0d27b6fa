#include "detect/app/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "detect/core/errors.hpp"
#include "detect/data/preprocess.hpp"
#include "detect/data/split.hpp"

namespace detect::app {

data::PreprocessResult phase_windows(const std::vector<data::SensorRecording>& recordings,
                                     data::Phase phase, const RunConfig& config) {
  std::vector<data::SensorRecording> selected;
  for (const auto& r : recordings) {
    if (r.phase == phase) selected.push_back(r);
  }
  return data::build_window_set(selected, config.preprocess);
}

TrainResult train_on_split(const data::SplitResult& split, const RunConfig& config,
                           const model::EpochCallback& on_epoch) {
  const auto counts = data::class_counts(split.train);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw PreprocessError("class '" + split.train.class_names[c] +
                            "' has no training windows");
    }
  }
  const auto stats = data::fit_norm_stats(split.train);
  const auto train = data::apply_norm(split.train, stats);
  const auto val = data::apply_norm(split.val, stats);

  TrainResult result;
  result.bundle = model::init_params(config.model_config());
  result.bundle.norm_stats = stats;
  result.bundle.class_names = split.train.class_names;
  for (const auto& w : split.val.windows) result.bundle.holdout_keys.push_back(w.source.key());
  result.epochs = model::train_classifier(result.bundle, train,
                                          val.empty() ? nullptr : &val,
                                          config.train_options(), on_epoch);
  result.val_accuracy = val.empty() ? 0.0 : model::accuracy_percent(result.bundle, val);
  result.train_windows = train.size();
  result.val_windows = val.size();
  return result;
}

std::vector<TrainResult> train_pre_treatment(const data::WindowSet& pre,
                                             const RunConfig& config,
                                             const model::EpochCallback& on_epoch) {
  if (pre.empty()) throw PreprocessError("no pre-treatment windows to train on");
  const auto counts = data::class_counts(pre);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw PreprocessError("class '" + pre.class_names[c] +
                            "' has no pre-treatment windows");
    }
  }
  std::vector<TrainResult> results;
  if (config.split_mode == SplitMode::holdout) {
    const auto split = data::stratified_split(pre, config.train_fraction, config.seed,
                                              config.split_granularity);
    results.push_back(train_on_split(split, config, on_epoch));
  } else {
    for (const auto& fold : data::kfold(pre, config.folds, config.seed)) {
      results.push_back(train_on_split(fold, config, on_epoch));
    }
  }
  return results;
}

std::vector<PatientAccuracy> measure_patients(const model::ClassifierBundle& bundle,
                                              const data::WindowSet& windows,
                                              std::vector<std::string>& warnings) {
  if (!bundle.norm_stats) throw ContractError("bundle carries no normalization statistics");
  const auto normalized =
      windows.normalized ? windows : data::apply_norm(windows, *bundle.norm_stats);
  const std::set<std::string> holdout(bundle.holdout_keys.begin(),
                                      bundle.holdout_keys.end());

  std::set<std::string> patients;
  for (const auto& w : normalized.windows) patients.insert(w.source.patient_id);

  std::vector<PatientAccuracy> out;
  for (const auto& id : patients) {
    auto pre = data::filter(normalized, [&](const data::Window& w) {
      return w.source.patient_id == id && w.source.phase == data::Phase::pre &&
             holdout.count(w.source.key()) > 0;
    });
    if (pre.empty()) {
      pre = data::filter(normalized, [&](const data::Window& w) {
        return w.source.patient_id == id && w.source.phase == data::Phase::pre;
      });
      if (!pre.empty()) {
        warnings.push_back("patient " + id +
                           ": no held-out pre-treatment windows, using all of them");
      }
    }
    const auto post = data::filter(normalized, [&](const data::Window& w) {
      return w.source.patient_id == id && w.source.phase == data::Phase::post;
    });
    if (pre.empty() || post.empty()) {
      warnings.push_back("patient " + id + ": missing " +
                         (pre.empty() ? "pre" : "post") +
                         "-treatment windows, skipped");
      continue;
    }
    out.push_back({id, eval::patient_accuracy(bundle, pre),
                   eval::patient_accuracy(bundle, post), pre.size(), post.size()});
  }
  return out;
}

eval::CohortReport assemble_report(const std::vector<PatientAccuracy>& accuracies,
                                   const std::vector<data::NrsEntry>& nrs,
                                   eval::NrsPredicate predicate,
                                   std::vector<std::string> warnings) {
  std::map<std::string, const data::NrsEntry*> by_id;
  for (const auto& e : nrs) by_id[e.patient_id] = &e;
  std::vector<eval::PatientOutcome> outcomes;
  std::vector<std::string> excluded;
  for (const auto& a : accuracies) {
    const auto it = by_id.find(a.patient_id);
    if (it == by_id.end()) {
      excluded.push_back(a.patient_id);
      warnings.push_back("patient " + a.patient_id +
                         " has recordings but no NRS entry; excluded");
      continue;
    }
    outcomes.push_back(eval::make_outcome(a.patient_id, a.acc_pre, a.acc_post,
                                          it->second->nrs_pre, it->second->nrs_post,
                                          predicate));
  }
  auto report = eval::build_report(std::move(outcomes));
  report.excluded_patients = std::move(excluded);
  warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
  report.warnings = std::move(warnings);
  return report;
}

}  // namespace detect::app
