#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/gait.hpp"
#include "lgpl/task.hpp"

namespace lgpl {

struct Trajectory {
  std::string id;
  double dt = 0.02;
  TaskVector source_omega;
  std::vector<TimeStep> steps;

  bool operator==(const Trajectory&) const = default;
};

/// Parameters of the analytic policy surrogate.
struct RolloutConfig {
  std::size_t steps = 100;
  double dt = 0.02;
  double noise_sigma = 0.0;
  double freq_hz = 2.0;
  double duty = kNominalDuty;
  double lag_tau = 0.2;  // first-order time constant, seconds

  void validate() const;
};

/// Generates a trajectory for a deployed (one-hot gait) command.
///
/// Velocity and pitch relax from 0 toward the targets as
/// target * (1 - exp(-t * dt / lag_tau)) with i.i.d. Gaussian measurement
/// noise of std noise_sigma on top; contacts follow contact_pattern for the
/// commanded gait with phase_t = (t * freq * dt) mod 1.
///
/// An empty id is replaced by one derived from the command, config and seed.
/// Throws std::invalid_argument when the gait is not one-hot.
Trajectory rollout(const TaskVector& omega, const RolloutConfig& config, std::uint64_t seed,
                   std::string id = {});

nlohmann::json serialize_trajectory(const Trajectory& traj);
Trajectory deserialize_trajectory(const nlohmann::json& j);

}  // namespace lgpl
