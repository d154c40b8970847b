#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/candidates.hpp"
#include "lgpl/chat.hpp"
#include "lgpl/fit.hpp"
#include "lgpl/oracle.hpp"

namespace lgpl {

enum class Method { kLgpl, kPl, kL2r, kLpl, kLgplPerturbed };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);
bool method_uses_llm(Method method);

/// Everything a single pipeline run needs besides the task and budget.
struct PipelineParams {
  RolloutConfig rollout{.noise_sigma = 0.02};
  std::size_t segment_length = 20;
  FitConfig fit;  // init is replaced by the candidate centroid
  RewardWeights weights;
  TaskRanges ranges;
  double perturb_sigma = 0.1;
  std::vector<InContextExample> examples = default_in_context_examples();
  std::size_t max_retries = 2;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rolls out the deployment projection of every candidate; trajectory i gets
/// id "c<i>" and a seed derived from `seed` and i.
std::vector<Trajectory> rollout_candidates(std::span<const TaskVector> candidates,
                                           const RolloutConfig& rollout, std::uint64_t seed,
                                           const TaskRanges& ranges = {});

/// Ranking (best-first candidate indices) -> sub-segment dataset -> fit,
/// initialized at the centroid of the raw candidates.
FitResult learn_from_ranking(std::span<const TaskVector> candidates,
                             std::span<const Trajectory> trajectories,
                             std::span<const std::size_t> ranking, const PipelineParams& params,
                             std::uint64_t seed);

struct MethodOutcome {
  TaskVector learned;
  std::vector<TaskVector> candidates;
  std::vector<std::size_t> ranking;  // empty for l2r
};

/// One pipeline run. `provider` may be null for methods that do not query a
/// language model; otherwise a ConfigurationError is thrown.
MethodOutcome run_method(Method method, const GroundTruthTask& task, std::size_t budget,
                         std::uint64_t seed, const PipelineParams& params, ChatProvider* provider);

struct ExperimentConfig {
  std::vector<GroundTruthTask> tasks = default_tasks();
  std::vector<Method> methods{Method::kLgplPerturbed, Method::kPl};
  std::vector<std::size_t> query_budgets{4, 8, 12};
  std::size_t seeds = 5;
  std::uint64_t base_seed = 0;
  std::size_t jobs = 1;
  PipelineParams params;
  std::optional<ChatEndpointConfig> endpoint;
  std::optional<std::filesystem::path> mock_fixture;

  void validate() const;
};

/// Reads the JSON config. Relative fixture paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir = {});
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view task, Method method,
                        std::size_t budget, std::size_t replicate);

struct CellResult {
  std::string task;
  Method method = Method::kPl;
  std::size_t budget = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::optional<TaskVector> learned;
  double mse = 0.0;
  double wall_time = 0.0;
  std::string error;  // non-empty when the cell failed
};

struct Aggregate {
  std::string task;  // "all" aggregates over every task
  Method method = Method::kPl;
  std::size_t budget = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // sorted by (task, method, budget, replicate)
  std::vector<Aggregate> aggregates;
  std::size_t failures = 0;

  const Aggregate* find(std::string_view task, Method method, std::size_t budget) const;
};

/// Full factorial sweep over tasks x methods x budgets x seeds. Cell failures
/// are recorded, not thrown.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<Aggregate> aggregate_cells(std::span<const CellResult> cells);

nlohmann::json result_to_json(const ExperimentResult& result, const ExperimentConfig& config);
ExperimentResult result_from_json(const nlohmann::json& j);
std::string aggregates_csv(std::span<const Aggregate> aggregates);
std::string format_report(const ExperimentResult& result);

}  // namespace lgpl
