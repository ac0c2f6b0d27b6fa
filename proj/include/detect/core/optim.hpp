#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "detect/core/tensor.hpp"

namespace detect::core {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Ordered parameter set. Entries share storage with the model that owns
/// them.
using ParameterSet = std::vector<NamedTensor>;

std::size_t parameter_count(const ParameterSet& params);

struct AdamWConfig {
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  std::uint64_t step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  AdamWConfig config;
};

OptimizerState make_optimizer_state(const ParameterSet& params,
                                    const AdamWConfig& config);

/// One AdamW update using each parameter's current gradient (a parameter
/// without a gradient is treated as having a zero gradient). Weight decay
/// is decoupled: theta <- theta * (1 - lr * wd) is applied before the
/// bias-corrected Adam step.
void adamw_step(ParameterSet& params, OptimizerState& state, double lr);

double global_grad_norm(const ParameterSet& params);

/// Scales all gradients by cap / ||g|| when the global l2 norm exceeds
/// `cap`. Returns the scale applied (1.0 when unchanged). Throws
/// TrainingDivergenceError naming the first parameter with a non-finite
/// gradient.
double clip_global_norm(ParameterSet& params, double cap);

/// Linear warmup from 0 to `base_lr` over `warmup_steps`, then cosine decay
/// to exactly 0 at `total_steps`.
class LrSchedule {
 public:
  LrSchedule(std::uint64_t warmup_steps, std::uint64_t total_steps,
             double base_lr);

  double lr_at(std::uint64_t step) const;

  std::uint64_t warmup_steps() const { return warmup_steps_; }
  std::uint64_t total_steps() const { return total_steps_; }
  double base_lr() const { return base_lr_; }

 private:
  std::uint64_t warmup_steps_;
  std::uint64_t total_steps_;
  double base_lr_;
};

}  // namespace detect::core
