#pragma once

#include <span>

#include "lgpl/gait.hpp"
#include "lgpl/task.hpp"

namespace lgpl {

/// d/d(omega) of a reward, in the TaskVector component order.
using TaskGradient = TaskArray;

// Factored reward
//
//   r(step; omega) = a1 * -(omega.velocity - v)^2
//                  + a2 * -(omega.pitch - rho)^2
//                  + sum_i a_{2+i} * omega.gait_weights[i] * m_i(step)
//
// where m_i is the match fraction of the step's contacts against gait i.
double step_reward(const TimeStep& step, const TaskVector& omega, const RewardWeights& weights);

TaskGradient step_reward_grad(const TimeStep& step, const TaskVector& omega,
                              const RewardWeights& weights);

/// Sum of step rewards. Throws std::invalid_argument on an empty segment.
double trajectory_return(std::span<const TimeStep> steps, const TaskVector& omega,
                         const RewardWeights& weights);

TaskGradient trajectory_return_grad(std::span<const TimeStep> steps, const TaskVector& omega,
                                    const RewardWeights& weights);

}  // namespace lgpl
