#include "lgpl/preference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace lgpl {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Negative log-likelihood of one label given d = R_first - R_second, and
// its derivative with respect to d.
double label_nll(double d, int label, double& dnll_dd) {
  const double p_first = bt_probability(d, 0.0);
  if (label == 1) {
    dnll_dd = -(1.0 - p_first);
    return softplus(-d);
  }
  dnll_dd = p_first;
  return softplus(d);
}

void require_nonempty(const PreferenceDataset& dataset) {
  if (dataset.comparisons.empty()) throw std::invalid_argument("preference dataset is empty");
}

}  // namespace

std::span<const TimeStep> PreferenceDataset::segment(const SegmentRef& ref) const {
  const auto it = trajectories.find(ref.trajectory_id);
  if (it == trajectories.end()) {
    throw std::invalid_argument("unknown trajectory id '" + ref.trajectory_id + "'");
  }
  const auto& steps = it->second.steps;
  if (ref.length < 1 || ref.start + ref.length > steps.size()) {
    throw std::invalid_argument("segment [" + std::to_string(ref.start) + ", +" +
                                std::to_string(ref.length) + ") out of range for '" +
                                ref.trajectory_id + "'");
  }
  return std::span<const TimeStep>(steps).subspan(ref.start, ref.length);
}

void PreferenceDataset::validate() const {
  for (const auto& c : comparisons) {
    if (c.label != 1 && c.label != 2) throw std::invalid_argument("comparison label must be 1 or 2");
    if (c.first.trajectory_id == c.second.trajectory_id) {
      throw std::invalid_argument("comparison references the same trajectory twice");
    }
    segment(c.first);
    segment(c.second);
  }
}

std::vector<PreferencePair> ranking_to_pairs(std::span<const std::string> ranking) {
  if (ranking.size() < 2) throw std::invalid_argument("a ranking needs at least 2 trajectories");
  const std::set<std::string> unique(ranking.begin(), ranking.end());
  if (unique.size() != ranking.size()) throw std::invalid_argument("ranking contains duplicate ids");

  std::vector<PreferencePair> pairs;
  pairs.reserve(ranking.size() * (ranking.size() - 1) / 2);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    for (std::size_t j = i + 1; j < ranking.size(); ++j) pairs.emplace_back(ranking[i], ranking[j]);
  }
  return pairs;
}

PreferenceDataset expand_subsegments(std::span<const PreferencePair> pairs,
                                     std::span<const Trajectory> trajectories, std::size_t k,
                                     std::optional<std::size_t> cap, std::uint64_t seed) {
  if (pairs.empty()) throw std::invalid_argument("no preference pairs to expand");
  if (k < 1) throw std::invalid_argument("segment length must be at least 1");

  std::map<std::string, const Trajectory*> by_id;
  for (const auto& t : trajectories) by_id.emplace(t.id, &t);
  auto lookup = [&](const std::string& id) -> const Trajectory& {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw std::invalid_argument("unknown trajectory id '" + id + "'");
    return *it->second;
  };

  // Per pair: number of segment starts on each side and the running offset
  // into the flattened cross product.
  struct PairBlock {
    const Trajectory* preferred;
    const Trajectory* other;
    std::size_t starts_a;
    std::size_t starts_b;
    std::size_t offset;
  };
  std::vector<PairBlock> blocks;
  std::size_t total = 0;
  for (const auto& [winner, loser] : pairs) {
    if (winner == loser) throw std::invalid_argument("pair compares '" + winner + "' with itself");
    const Trajectory& a = lookup(winner);
    const Trajectory& b = lookup(loser);
    if (k >= a.steps.size() || k >= b.steps.size()) {
      throw std::invalid_argument("segment length k=" + std::to_string(k) +
                                  " must be shorter than every trajectory");
    }
    const std::size_t na = a.steps.size() - k;
    const std::size_t nb = b.steps.size() - k;
    blocks.push_back({&a, &b, na, nb, total});
    total += na * nb;
  }

  std::vector<std::size_t> chosen;
  if (cap && total > *cap) {
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), std::size_t{0});
    chosen.reserve(*cap);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), *cap, rng);
  } else {
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  }

  PreferenceDataset dataset;
  dataset.comparisons.reserve(chosen.size());
  std::size_t block = 0;
  for (std::size_t flat : chosen) {
    while (flat >= blocks[block].offset + blocks[block].starts_a * blocks[block].starts_b) ++block;
    const PairBlock& pb = blocks[block];
    const std::size_t local = flat - pb.offset;
    Comparison c;
    c.first = {pb.preferred->id, local / pb.starts_b, k};
    c.second = {pb.other->id, local % pb.starts_b, k};
    c.label = 1;
    dataset.comparisons.push_back(std::move(c));
  }
  for (const auto& pb : blocks) {
    dataset.trajectories.emplace(pb.preferred->id, *pb.preferred);
    dataset.trajectories.emplace(pb.other->id, *pb.other);
  }
  return dataset;
}

double bt_probability(double return_a, double return_b) {
  const double d = return_a - return_b;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

double bce_loss(const PreferenceDataset& dataset, const TaskVector& omega,
                const RewardWeights& weights) {
  require_nonempty(dataset);
  double total = 0.0;
  for (const auto& c : dataset.comparisons) {
    const double d = trajectory_return(dataset.segment(c.first), omega, weights) -
                     trajectory_return(dataset.segment(c.second), omega, weights);
    double unused = 0.0;
    total += label_nll(d, c.label, unused);
  }
  return total / static_cast<double>(dataset.comparisons.size());
}

TaskGradient bce_loss_grad(const PreferenceDataset& dataset, const TaskVector& omega,
                           const RewardWeights& weights) {
  require_nonempty(dataset);
  TaskGradient grad{};
  for (const auto& c : dataset.comparisons) {
    const auto first = dataset.segment(c.first);
    const auto second = dataset.segment(c.second);
    const double d = trajectory_return(first, omega, weights) - trajectory_return(second, omega, weights);
    double dnll_dd = 0.0;
    label_nll(d, c.label, dnll_dd);
    const TaskGradient ga = trajectory_return_grad(first, omega, weights);
    const TaskGradient gb = trajectory_return_grad(second, omega, weights);
    for (std::size_t i = 0; i < kTaskDim; ++i) grad[i] += dnll_dd * (ga[i] - gb[i]);
  }
  for (double& g : grad) g /= static_cast<double>(dataset.comparisons.size());
  return grad;
}

SegmentStats SegmentStats::from_steps(std::span<const TimeStep> steps) {
  if (steps.empty()) throw std::invalid_argument("degenerate segment: no steps");
  SegmentStats s;
  s.count = static_cast<double>(steps.size());
  for (const auto& step : steps) {
    s.sum_v += step.v;
    s.sum_v2 += step.v * step.v;
    s.sum_rho += step.rho;
    s.sum_rho2 += step.rho * step.rho;
    for (std::size_t i = 0; i < kNumGaits; ++i) s.sum_match[i] += match_fraction(gait_from_index(i), step);
  }
  return s;
}

double SegmentStats::segment_return(const TaskVector& omega, const RewardWeights& weights) const {
  const auto& a = weights.alphas;
  const double w = omega.velocity;
  const double p = omega.pitch;
  double r = -a[0] * (count * w * w - 2.0 * w * sum_v + sum_v2);
  r -= a[1] * (count * p * p - 2.0 * p * sum_rho + sum_rho2);
  for (std::size_t i = 0; i < kNumGaits; ++i) r += a[2 + i] * omega.gait_weights[i] * sum_match[i];
  return r;
}

TaskGradient SegmentStats::return_grad(const TaskVector& omega, const RewardWeights& weights) const {
  const auto& a = weights.alphas;
  TaskGradient g{};
  g[0] = -2.0 * a[0] * (count * omega.velocity - sum_v);
  g[1] = -2.0 * a[1] * (count * omega.pitch - sum_rho);
  for (std::size_t i = 0; i < kNumGaits; ++i) g[2 + i] = a[2 + i] * sum_match[i];
  return g;
}

CompiledDataset::CompiledDataset(const PreferenceDataset& dataset) {
  require_nonempty(dataset);
  segments_.reserve(dataset.comparisons.size());
  labels_.reserve(dataset.comparisons.size());
  for (const auto& c : dataset.comparisons) {
    segments_.emplace_back(SegmentStats::from_steps(dataset.segment(c.first)),
                           SegmentStats::from_steps(dataset.segment(c.second)));
    labels_.push_back(c.label);
  }
}

double CompiledDataset::loss(const TaskVector& omega, const RewardWeights& weights) const {
  double total = 0.0;
  for (std::size_t n = 0; n < segments_.size(); ++n) {
    const double d = segments_[n].first.segment_return(omega, weights) -
                     segments_[n].second.segment_return(omega, weights);
    double unused = 0.0;
    total += label_nll(d, labels_[n], unused);
  }
  return total / static_cast<double>(segments_.size());
}

double CompiledDataset::loss_and_grad(const TaskVector& omega, const RewardWeights& weights,
                                      TaskGradient& grad) const {
  grad.fill(0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < segments_.size(); ++n) {
    const auto& [first, second] = segments_[n];
    const double d = first.segment_return(omega, weights) - second.segment_return(omega, weights);
    double dnll_dd = 0.0;
    total += label_nll(d, labels_[n], dnll_dd);
    const TaskGradient ga = first.return_grad(omega, weights);
    const TaskGradient gb = second.return_grad(omega, weights);
    for (std::size_t i = 0; i < kTaskDim; ++i) grad[i] += dnll_dd * (ga[i] - gb[i]);
  }
  const double n = static_cast<double>(segments_.size());
  for (double& g : grad) g /= n;
  return total / n;
}

void to_json(nlohmann::json& j, const SegmentRef& ref) {
  j = {{"trajectory_id", ref.trajectory_id}, {"start", ref.start}, {"length", ref.length}};
}

void from_json(const nlohmann::json& j, SegmentRef& ref) {
  ref.trajectory_id = j.at("trajectory_id").get<std::string>();
  ref.start = j.at("start").get<std::size_t>();
  ref.length = j.at("length").get<std::size_t>();
}

void to_json(nlohmann::json& j, const Comparison& c) {
  j = {{"first", c.first}, {"second", c.second}, {"label", c.label}};
}

void from_json(const nlohmann::json& j, Comparison& c) {
  c.first = j.at("first").get<SegmentRef>();
  c.second = j.at("second").get<SegmentRef>();
  c.label = j.at("label").get<int>();
}

nlohmann::json dataset_to_json(const PreferenceDataset& dataset) {
  nlohmann::json trajs = nlohmann::json::array();
  for (const auto& [id, traj] : dataset.trajectories) trajs.push_back(serialize_trajectory(traj));
  return {{"comparisons", dataset.comparisons}, {"trajectories", std::move(trajs)}};
}

PreferenceDataset dataset_from_json(const nlohmann::json& j) {
  PreferenceDataset dataset;
  try {
    dataset.comparisons = j.at("comparisons").get<std::vector<Comparison>>();
    for (const auto& t : j.at("trajectories")) {
      Trajectory traj = deserialize_trajectory(t);
      const std::string id = traj.id;
      dataset.trajectories.emplace(id, std::move(traj));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed preference dataset: ") + e.what());
  }
  dataset.validate();
  return dataset;
}

}  // namespace lgpl
