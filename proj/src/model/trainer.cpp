#include "detect/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "detect/core/errors.hpp"
#include "detect/core/loss.hpp"
#include "detect/core/optim.hpp"
#include "detect/data/batch.hpp"

namespace detect::model {

std::vector<EpochReport> train_classifier(ClassifierBundle& bundle,
                                          const data::WindowSet& train,
                                          const data::WindowSet* val,
                                          const TrainOptions& options,
                                          const EpochCallback& on_epoch) {
  if (train.empty()) throw ContractError("training set is empty");
  if (!train.normalized) throw ContractError("training windows must be normalized");
  if (options.epochs == 0 || options.batch_size == 0) {
    throw ConfigError("epochs and batch_size must be positive");
  }
  if (train.window_length != bundle.config.seq_len) {
    throw ConfigError("window length " + std::to_string(train.window_length) +
                      " does not match model seq_len " +
                      std::to_string(bundle.config.seq_len));
  }

  core::tune_allocator_for_training();
  auto params = bundle.parameters();
  core::OptimizerState state = core::make_optimizer_state(
      params, {options.weight_decay, options.beta1, options.beta2, options.adam_eps});

  const std::size_t n = train.size();
  const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
  const std::uint64_t total_steps = options.epochs * batches;
  const auto warmup = static_cast<std::uint64_t>(
      std::llround(options.warmup_fraction * static_cast<double>(total_steps)));
  const core::LrSchedule schedule(std::min(warmup, total_steps), total_steps,
                                  options.learning_rate);

  std::mt19937_64 shuffle_rng(options.seed);
  std::mt19937_64 dropout_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochReport> reports;
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    double lr = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * options.batch_size;
      const std::size_t end = std::min(n, begin + options.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const auto batch = data::make_batch(train, idx);
      const auto labels = data::batch_labels(train, idx);

      const auto logits = forward(bundle, batch, true, &dropout_rng);
      const auto loss =
          core::smoothed_cross_entropy_from_logits(logits, labels, options.label_smoothing);
      if (!std::isfinite(loss.item())) {
        throw TrainingDivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                      ", step " + std::to_string(step));
      }
      for (auto& p : params) p.tensor.clear_grad();
      core::backward(loss);
      if (options.clip_norm > 0.0) core::clip_global_norm(params, options.clip_norm);

      lr = schedule.lr_at(step + 1);
      core::adamw_step(params, state, lr);
      ++step;

      loss_sum += loss.item() * static_cast<double>(idx.size());
      const auto lv = logits.values();
      const std::size_t k = logits.dim(1);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (argmax_lowest(lv.subspan(i * k, k)) == labels[i]) ++correct;
      }
    }
    EpochReport report;
    report.epoch = epoch;
    report.loss = loss_sum / static_cast<double>(n);
    report.train_accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
    if (val != nullptr && !val->empty()) report.val_accuracy = accuracy_percent(bundle, *val);
    report.learning_rate = lr;
    reports.push_back(report);
    if (on_epoch && !on_epoch(report)) break;
  }
  return reports;
}

std::vector<std::size_t> predict_windows(const ClassifierBundle& bundle,
                                         const data::WindowSet& set,
                                         std::size_t batch_size) {
  core::tune_allocator_for_training();
  std::vector<std::size_t> out;
  out.reserve(set.size());
  std::vector<std::size_t> idx;
  for (std::size_t begin = 0; begin < set.size(); begin += batch_size) {
    idx.clear();
    for (std::size_t i = begin; i < std::min(set.size(), begin + batch_size); ++i) idx.push_back(i);
    const auto pred = predict(bundle, data::make_batch(set, idx));
    out.insert(out.end(), pred.classes.begin(), pred.classes.end());
  }
  return out;
}

double accuracy_percent(const ClassifierBundle& bundle, const data::WindowSet& set,
                        std::size_t batch_size) {
  if (set.empty()) throw ContractError("accuracy of an empty window set");
  const auto pred = predict_windows(bundle, set, batch_size);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (pred[i] == set.windows[i].label) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace detect::model
