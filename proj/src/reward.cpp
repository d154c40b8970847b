#include "lgpl/reward.hpp"

#include <stdexcept>

namespace lgpl {

double step_reward(const TimeStep& step, const TaskVector& omega, const RewardWeights& weights) {
  const auto& a = weights.alphas;
  const double dv = omega.velocity - step.v;
  const double dp = omega.pitch - step.rho;
  double r = -a[0] * dv * dv - a[1] * dp * dp;
  for (std::size_t i = 0; i < kNumGaits; ++i) {
    r += a[2 + i] * omega.gait_weights[i] * match_fraction(gait_from_index(i), step);
  }
  return r;
}

TaskGradient step_reward_grad(const TimeStep& step, const TaskVector& omega,
                              const RewardWeights& weights) {
  const auto& a = weights.alphas;
  TaskGradient g{};
  g[0] = -2.0 * a[0] * (omega.velocity - step.v);
  g[1] = -2.0 * a[1] * (omega.pitch - step.rho);
  for (std::size_t i = 0; i < kNumGaits; ++i) {
    g[2 + i] = a[2 + i] * match_fraction(gait_from_index(i), step);
  }
  return g;
}

double trajectory_return(std::span<const TimeStep> steps, const TaskVector& omega,
                         const RewardWeights& weights) {
  if (steps.empty()) throw std::invalid_argument("degenerate segment: no steps");
  double total = 0.0;
  for (const auto& step : steps) total += step_reward(step, omega, weights);
  return total;
}

TaskGradient trajectory_return_grad(std::span<const TimeStep> steps, const TaskVector& omega,
                                    const RewardWeights& weights) {
  if (steps.empty()) throw std::invalid_argument("degenerate segment: no steps");
  TaskGradient total{};
  for (const auto& step : steps) {
    const TaskGradient g = step_reward_grad(step, omega, weights);
    for (std::size_t i = 0; i < kTaskDim; ++i) total[i] += g[i];
  }
  return total;
}

}  // namespace lgpl
