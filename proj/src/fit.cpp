#include "lgpl/fit.hpp"

#include <cmath>
#include <string>

namespace lgpl {

void FitConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
}

FitResult fit(const PreferenceDataset& dataset, const RewardWeights& weights,
              const FitConfig& config) {
  config.validate();
  weights.validate();
  const CompiledDataset compiled(dataset);

  FitResult result;
  result.loss_trace.reserve(config.iterations + 1);

  TaskVector omega = clamp_to_ranges(config.init, config.ranges);
  TaskGradient grad{};
  for (std::size_t it = 0; it <= config.iterations; ++it) {
    const double loss = compiled.loss_and_grad(omega, weights, grad);
    if (!std::isfinite(loss)) {
      throw FitDivergence(it, "fit diverged: non-finite loss at iteration " + std::to_string(it));
    }
    result.loss_trace.push_back(loss);
    if (it == 0 || loss < result.loss) {
      result.loss = loss;
      result.omega = omega;
      result.best_iteration = it;
    }
    if (it == config.iterations) break;

    TaskArray x = omega.to_array();
    for (std::size_t i = 0; i < kTaskDim; ++i) x[i] -= config.learning_rate * grad[i];
    omega = clamp_to_ranges(TaskVector::from_array(x), config.ranges);
  }
  return result;
}

}  // namespace lgpl
