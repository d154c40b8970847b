#include "lgpl/task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lgpl {

TaskArray TaskVector::to_array() const {
  return {velocity, pitch, gait_weights[0], gait_weights[1], gait_weights[2]};
}

TaskVector TaskVector::from_array(std::span<const double, kTaskDim> values) {
  TaskVector omega;
  omega.velocity = values[0];
  omega.pitch = values[1];
  omega.gait_weights = {values[2], values[3], values[4]};
  return omega;
}

void RewardWeights::validate() const {
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (!std::isfinite(alphas[j]) || alphas[j] <= 0.0) {
      throw std::invalid_argument("reward weight alpha[" + std::to_string(j) +
                                  "] must be finite and positive");
    }
  }
}

TaskVector clamp_to_ranges(const TaskVector& omega, const TaskRanges& ranges) {
  TaskVector out = omega;
  out.velocity = std::clamp(omega.velocity, ranges.velocity_min, ranges.velocity_max);
  out.pitch = std::clamp(omega.pitch, ranges.pitch_min, ranges.pitch_max);
  for (double& w : out.gait_weights) w = std::clamp(w, 0.0, 1.0);
  return out;
}

bool within_ranges(const TaskVector& omega, const TaskRanges& ranges) {
  if (!(omega.velocity >= ranges.velocity_min && omega.velocity <= ranges.velocity_max)) return false;
  if (!(omega.pitch >= ranges.pitch_min && omega.pitch <= ranges.pitch_max)) return false;
  return std::all_of(omega.gait_weights.begin(), omega.gait_weights.end(),
                     [](double w) { return w >= 0.0 && w <= 1.0; });
}

bool has_one_hot_gait(const TaskVector& omega) {
  int ones = 0;
  for (double w : omega.gait_weights) {
    if (w == 1.0) {
      ++ones;
    } else if (w != 0.0) {
      return false;
    }
  }
  return ones == 1;
}

std::size_t dominant_gait_index(const TaskVector& omega) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumGaits; ++i) {
    if (omega.gait_weights[i] > omega.gait_weights[best]) best = i;
  }
  return best;
}

TaskVector project_for_deployment(const TaskVector& omega, const TaskRanges& ranges) {
  TaskVector out = clamp_to_ranges(omega, ranges);
  const std::size_t hot = dominant_gait_index(omega);
  out.gait_weights = {0.0, 0.0, 0.0};
  out.gait_weights[hot] = 1.0;
  return out;
}

double mse(const TaskVector& a, const TaskVector& b) {
  const TaskArray x = a.to_array();
  const TaskArray y = b.to_array();
  double sum = 0.0;
  for (std::size_t i = 0; i < kTaskDim; ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum / static_cast<double>(kTaskDim);
}

TaskVector centroid(std::span<const TaskVector> omegas) {
  if (omegas.empty()) throw std::invalid_argument("centroid of an empty candidate set");
  TaskArray acc{};
  for (const auto& omega : omegas) {
    const TaskArray a = omega.to_array();
    for (std::size_t i = 0; i < kTaskDim; ++i) acc[i] += a[i];
  }
  for (double& v : acc) v /= static_cast<double>(omegas.size());
  return TaskVector::from_array(acc);
}

void to_json(nlohmann::json& j, const TaskVector& omega) {
  j = nlohmann::json::array();
  for (double v : omega.to_array()) j.push_back(v);
}

void from_json(const nlohmann::json& j, TaskVector& omega) {
  if (!j.is_array() || j.size() != kTaskDim) {
    throw std::invalid_argument("task vector must be a JSON array of 5 numbers");
  }
  TaskArray values{};
  for (std::size_t i = 0; i < kTaskDim; ++i) {
    if (!j[i].is_number()) throw std::invalid_argument("task vector entries must be numbers");
    values[i] = j[i].get<double>();
    if (!std::isfinite(values[i])) throw std::invalid_argument("task vector entries must be finite");
  }
  omega = TaskVector::from_array(values);
}

}  // namespace lgpl
