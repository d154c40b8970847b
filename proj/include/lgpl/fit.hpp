#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lgpl/preference.hpp"

namespace lgpl {

struct FitConfig {
  double learning_rate = 0.05;
  std::size_t iterations = 500;
  TaskVector init;
  std::size_t comparison_cap = 2000;
  std::uint64_t seed = 0;
  TaskRanges ranges;

  void validate() const;
};

struct FitResult {
  TaskVector omega;               // best iterate
  double loss = 0.0;              // its loss
  std::size_t best_iteration = 0;
  std::vector<double> loss_trace;  // loss of iterate 0 (init) through `iterations`
};

class FitDivergence : public std::runtime_error {
 public:
  FitDivergence(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Full-batch projected gradient descent on the Bradley-Terry loss starting
/// from config.init (clamped). Returns the iterate with the lowest loss.
/// Throws FitDivergence when the loss turns non-finite.
FitResult fit(const PreferenceDataset& dataset, const RewardWeights& weights,
              const FitConfig& config);

}  // namespace lgpl
