#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/reward.hpp"
#include "lgpl/trajectory.hpp"

namespace lgpl {

/// A hidden target behavior. `instruction` is what the simulated user would
/// type; it defaults to a sentence built from the name.
struct GroundTruthTask {
  std::string name;
  TaskVector omega_star;
  std::string instruction;

  std::string effective_instruction() const;
  void validate() const;
};

/// Indices sorted by descending return under the task's omega_star,
/// ties kept in input order. Throws std::invalid_argument for fewer than 2.
std::vector<std::size_t> oracle_rank(std::span<const Trajectory> trajectories,
                                     const GroundTruthTask& truth, const RewardWeights& weights);

/// Samples a Bradley-Terry label: 1 with probability bt_probability(a, b).
int stochastic_label(double return_a, double return_b, std::uint64_t seed);

/// The five emotive tasks with fixture target vectors.
std::vector<GroundTruthTask> default_tasks();

void to_json(nlohmann::json& j, const GroundTruthTask& task);
void from_json(const nlohmann::json& j, GroundTruthTask& task);

std::vector<GroundTruthTask> load_tasks(const std::filesystem::path& path);

}  // namespace lgpl
