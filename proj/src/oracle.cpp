#include "lgpl/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lgpl/preference.hpp"

namespace lgpl {

std::string GroundTruthTask::effective_instruction() const {
  if (!instruction.empty()) return instruction;
  return "Make the robot dog walk in a way that looks " + name + ".";
}

void GroundTruthTask::validate() const {
  if (name.empty()) throw std::invalid_argument("ground-truth task needs a name");
  if (!within_ranges(omega_star) || !has_one_hot_gait(omega_star)) {
    throw std::invalid_argument("omega_star of task '" + name +
                                "' must be in range with a one-hot gait");
  }
}

std::vector<std::size_t> oracle_rank(std::span<const Trajectory> trajectories,
                                     const GroundTruthTask& truth, const RewardWeights& weights) {
  if (trajectories.size() < 2) throw std::invalid_argument("oracle ranking needs at least 2 trajectories");
  std::vector<double> returns;
  returns.reserve(trajectories.size());
  for (const auto& t : trajectories) returns.push_back(trajectory_return(t.steps, truth.omega_star, weights));

  std::vector<std::size_t> order(trajectories.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return returns[a] > returns[b]; });
  return order;
}

int stochastic_label(double return_a, double return_b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution first(bt_probability(return_a, return_b));
  return first(rng) ? 1 : 2;
}

std::vector<GroundTruthTask> default_tasks() {
  auto task = [](std::string name, TaskArray omega) {
    return GroundTruthTask{std::move(name), TaskVector::from_array(omega), {}};
  };
  return {
      task("happy", {1.2, 0.2, 1, 0, 0}),
      task("sad", {0.3, -0.25, 0, 1, 0}),
      task("scared", {0.8, -0.3, 0, 1, 0}),
      task("angry", {1.0, -0.15, 0, 0, 1}),
      task("excited", {1.4, 0.3, 0, 0, 1}),
  };
}

void to_json(nlohmann::json& j, const GroundTruthTask& task) {
  j = {{"name", task.name}, {"omega_star", task.omega_star}};
  if (!task.instruction.empty()) j["instruction"] = task.instruction;
}

void from_json(const nlohmann::json& j, GroundTruthTask& task) {
  task.name = j.at("name").get<std::string>();
  task.omega_star = j.at("omega_star").get<TaskVector>();
  task.instruction = j.value("instruction", std::string{});
}

std::vector<GroundTruthTask> load_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task fixture " + path.string());
  auto tasks = nlohmann::json::parse(in).get<std::vector<GroundTruthTask>>();
  for (const auto& t : tasks) t.validate();
  return tasks;
}

}  // namespace lgpl
