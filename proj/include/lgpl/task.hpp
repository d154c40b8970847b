#pragma once

#include <array>
#include <cstddef>
#include <span>

#include <nlohmann/json.hpp>

namespace lgpl {

inline constexpr std::size_t kTaskDim = 5;
inline constexpr std::size_t kNumGaits = 3;

using TaskArray = std::array<double, kTaskDim>;

/// Valid command ranges. The gait weights are always bounded to [0, 1].
struct TaskRanges {
  double velocity_min = 0.0;
  double velocity_max = 1.5;
  double pitch_min = -0.4;
  double pitch_max = 0.4;
};

/// The task parameterization: [velocity (m/s), pitch (rad), trot, pace, bound].
///
/// During learning the gait weights are free reals; the policy surrogate only
/// accepts the deployment form with a one-hot gait (see project_for_deployment).
struct TaskVector {
  double velocity = 0.0;
  double pitch = 0.0;
  std::array<double, kNumGaits> gait_weights{};

  TaskArray to_array() const;
  static TaskVector from_array(std::span<const double, kTaskDim> values);

  bool operator==(const TaskVector&) const = default;
};

/// Positive per-factor weights alpha_j, in factor order
/// (velocity, pitch, trot, pace, bound).
struct RewardWeights {
  TaskArray alphas{1.0, 1.0, 0.5, 0.5, 0.5};

  /// Throws std::invalid_argument unless every alpha is finite and > 0.
  void validate() const;
};

TaskVector clamp_to_ranges(const TaskVector& omega, const TaskRanges& ranges = {});

bool within_ranges(const TaskVector& omega, const TaskRanges& ranges = {});

/// True when the gait weights are exactly one 1 and two 0s.
bool has_one_hot_gait(const TaskVector& omega);

/// Index of the largest gait weight, lowest index on ties.
std::size_t dominant_gait_index(const TaskVector& omega);

/// Clamps velocity and pitch and replaces the gait weights by a one-hot at
/// the argmax (ties go to the lowest index: trot < pace < bound).
TaskVector project_for_deployment(const TaskVector& omega, const TaskRanges& ranges = {});

/// Mean of squared component differences over the five raw components.
double mse(const TaskVector& a, const TaskVector& b);

/// Component-wise mean. Throws std::invalid_argument on an empty input.
TaskVector centroid(std::span<const TaskVector> omegas);

// JSON layout: [velocity, pitch, trot, pace, bound].
void to_json(nlohmann::json& j, const TaskVector& omega);
void from_json(const nlohmann::json& j, TaskVector& omega);

}  // namespace lgpl
