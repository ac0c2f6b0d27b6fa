#include "detect/core/optim.hpp"

#include <cmath>
#include <numbers>

#include "detect/core/errors.hpp"

namespace detect::core {

std::size_t parameter_count(const ParameterSet& params) {
  std::size_t total = 0;
  for (const auto& p : params) total += p.tensor.numel();
  return total;
}

OptimizerState make_optimizer_state(const ParameterSet& params,
                                    const AdamWConfig& config) {
  OptimizerState state;
  state.config = config;
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.tensor.numel(), 0.0);
    state.second_moment.emplace_back(p.tensor.numel(), 0.0);
  }
  return state;
}

void adamw_step(ParameterSet& params, OptimizerState& state, double lr) {
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ContractError("optimizer state tracks " +
                        std::to_string(state.first_moment.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  const auto& cfg = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = 1.0 - lr * cfg.weight_decay;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& tensor = params[i].tensor;
    auto values = tensor.mutable_values();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != values.size() || v.size() != values.size()) {
      throw ContractError("moment buffers for '" + params[i].name +
                          "' do not match shape " +
                          shape_to_string(tensor.shape()));
    }
    const auto grad = tensor.grad();
    const bool has_grad = !grad.empty();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = has_grad ? grad[j] : 0.0;
      values[j] *= decay;
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

double global_grad_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    for (double g : p.tensor.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_global_norm(ParameterSet& params, double cap) {
  if (!(cap > 0.0)) {
    throw ContractError("clip cap must be positive, got " + std::to_string(cap));
  }
  for (const auto& p : params) {
    for (double g : p.tensor.grad()) {
      if (!std::isfinite(g)) {
        throw TrainingDivergenceError("non-finite gradient in parameter '" +
                                      p.name + "'");
      }
    }
  }
  const double norm = global_grad_norm(params);
  if (norm <= cap) return 1.0;
  const double factor = cap / norm;
  for (auto& p : params) {
    for (double& g : p.tensor.mutable_grad()) g *= factor;
  }
  return factor;
}

LrSchedule::LrSchedule(std::uint64_t warmup_steps, std::uint64_t total_steps,
                       double base_lr)
    : warmup_steps_(warmup_steps), total_steps_(total_steps), base_lr_(base_lr) {
  if (total_steps == 0) throw ContractError("total_steps must be positive");
  if (warmup_steps > total_steps) {
    throw ContractError("warmup_steps (" + std::to_string(warmup_steps) +
                        ") exceeds total_steps (" + std::to_string(total_steps) +
                        ")");
  }
  if (!(base_lr > 0.0)) {
    throw ContractError("base learning rate must be positive");
  }
}

double LrSchedule::lr_at(std::uint64_t step) const {
  if (step > total_steps_) {
    throw ScheduleExhaustedError("step " + std::to_string(step) +
                                 " is past the schedule end " +
                                 std::to_string(total_steps_));
  }
  if (step < warmup_steps_) {
    return base_lr_ * static_cast<double>(step) /
           static_cast<double>(warmup_steps_);
  }
  if (total_steps_ == warmup_steps_) return base_lr_;
  const double progress = static_cast<double>(step - warmup_steps_) /
                          static_cast<double>(total_steps_ - warmup_steps_);
  if (progress >= 1.0) return 0.0;
  return base_lr_ * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace detect::core
