#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "detect/data/types.hpp"
#include "detect/model/transformer.hpp"

namespace detect::model {

struct TrainOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double label_smoothing = 0.1;
  double clip_norm = 1.0;
  double warmup_fraction = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 42;
};

struct EpochReport {
  std::size_t epoch = 0;            // 1-based
  double loss = 0.0;                // mean training loss over the epoch
  double train_accuracy = 0.0;      // percent, from the train-mode forward passes
  std::optional<double> val_accuracy;  // percent, eval mode
  double learning_rate = 0.0;       // at the last step of the epoch
};

/// Called after every epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochReport&)>;

/// Mini-batch training of `bundle` in place on normalized windows:
/// shuffled batches, smoothed cross-entropy, global-norm clipping, AdamW,
/// and a warmup + cosine schedule over epochs * ceil(N / batch) steps.
/// Throws TrainingDivergenceError on a non-finite loss or gradient.
std::vector<EpochReport> train_classifier(ClassifierBundle& bundle,
                                          const data::WindowSet& train,
                                          const data::WindowSet* val,
                                          const TrainOptions& options,
                                          const EpochCallback& on_epoch = {});

/// Eval-mode predictions for every window, in set order.
std::vector<std::size_t> predict_windows(const ClassifierBundle& bundle,
                                         const data::WindowSet& set,
                                         std::size_t batch_size = 64);

/// Percent of windows whose prediction equals the label.
double accuracy_percent(const ClassifierBundle& bundle, const data::WindowSet& set,
                        std::size_t batch_size = 64);

}  // namespace detect::model
