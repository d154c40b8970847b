#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/reward.hpp"
#include "lgpl/trajectory.hpp"

namespace lgpl {

/// Upper bound (exclusive) on the number of trajectories an interactive user
/// ranks at once. Offline sweeps may rank more.
inline constexpr std::size_t kMaxRankedTrajectories = 10;

struct SegmentRef {
  std::string trajectory_id;
  std::size_t start = 0;
  std::size_t length = 0;

  bool operator==(const SegmentRef&) const = default;
};

/// label 1: first preferred, label 2: second preferred.
struct Comparison {
  SegmentRef first;
  SegmentRef second;
  int label = 1;

  bool operator==(const Comparison&) const = default;
};

struct PreferenceDataset {
  std::vector<Comparison> comparisons;
  std::map<std::string, Trajectory> trajectories;

  std::span<const TimeStep> segment(const SegmentRef& ref) const;

  /// Throws std::invalid_argument if any reference fails to resolve or a
  /// comparison breaks its invariants.
  void validate() const;
};

using PreferencePair = std::pair<std::string, std::string>;  // (preferred, other)

/// All C(n, 2) pairs implied by a best-first ranking.
/// Requires at least 2 distinct ids; throws std::invalid_argument otherwise.
std::vector<PreferencePair> ranking_to_pairs(std::span<const std::string> ranking);

/// Cross product of the length-k sub-segments (starts 0 .. T-k-1) of both
/// trajectories in every pair, preferred segment listed first. When the
/// total exceeds `cap`, a seeded uniform subsample of exactly `cap`
/// comparisons is kept in original order.
PreferenceDataset expand_subsegments(std::span<const PreferencePair> pairs,
                                     std::span<const Trajectory> trajectories, std::size_t k,
                                     std::optional<std::size_t> cap, std::uint64_t seed);

/// P[a preferred over b] = 1 / (1 + exp(return_b - return_a)), overflow-safe.
double bt_probability(double return_a, double return_b);

/// Mean Bradley-Terry negative log-likelihood of the labels.
double bce_loss(const PreferenceDataset& dataset, const TaskVector& omega,
                const RewardWeights& weights);

TaskGradient bce_loss_grad(const PreferenceDataset& dataset, const TaskVector& omega,
                           const RewardWeights& weights);

/// Sufficient statistics of a segment; the return is a quadratic in omega.
struct SegmentStats {
  double count = 0.0;
  double sum_v = 0.0;
  double sum_v2 = 0.0;
  double sum_rho = 0.0;
  double sum_rho2 = 0.0;
  std::array<double, kNumGaits> sum_match{};

  static SegmentStats from_steps(std::span<const TimeStep> steps);
  double segment_return(const TaskVector& omega, const RewardWeights& weights) const;
  TaskGradient return_grad(const TaskVector& omega, const RewardWeights& weights) const;
};

/// The dataset reduced to per-segment statistics; loss and gradient cost
/// O(comparisons) instead of O(comparisons * k).
class CompiledDataset {
 public:
  explicit CompiledDataset(const PreferenceDataset& dataset);

  double loss(const TaskVector& omega, const RewardWeights& weights) const;
  double loss_and_grad(const TaskVector& omega, const RewardWeights& weights,
                       TaskGradient& grad) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::pair<SegmentStats, SegmentStats>> segments_;
  std::vector<int> labels_;
};

void to_json(nlohmann::json& j, const SegmentRef& ref);
void from_json(const nlohmann::json& j, SegmentRef& ref);
void to_json(nlohmann::json& j, const Comparison& c);
void from_json(const nlohmann::json& j, Comparison& c);

nlohmann::json dataset_to_json(const PreferenceDataset& dataset);
PreferenceDataset dataset_from_json(const nlohmann::json& j);

}  // namespace lgpl
