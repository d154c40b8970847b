#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/chat.hpp"
#include "lgpl/task.hpp"

namespace lgpl {

struct InContextExample {
  std::string description;
  TaskVector omega;
};

struct CandidateRequest {
  std::string instruction;
  std::size_t n = 4;
  std::vector<InContextExample> examples;
  std::string diversity_note =
      "Spread the candidates out: vary the gait between trot, pace and bound and "
      "vary velocity and pitch, while keeping every candidate plausible for the instruction.";
};

/// Expert-written description -> vector pairs used as in-context examples.
std::vector<InContextExample> default_in_context_examples();

void to_json(nlohmann::json& j, const InContextExample& example);
void from_json(const nlohmann::json& j, InContextExample& example);

/// Velocity and pitch uniform over the ranges, gait one-hot uniform over
/// the three gaits. Deterministic per seed.
std::vector<TaskVector> sample_uniform(std::size_t n, const TaskRanges& ranges, std::uint64_t seed);

/// Gaussian perturbation (std sigma) of omega_star's velocity and pitch,
/// clamped; the gait is resampled uniformly with probability min(1, 2 sigma)
/// and otherwise kept. Outputs are deployment-projected.
std::vector<TaskVector> sample_perturbed(const TaskVector& omega_star, double sigma, std::size_t n,
                                         std::uint64_t seed, const TaskRanges& ranges = {});

std::string build_prompt(const CandidateRequest& request, const TaskRanges& ranges = {});

/// Parses the last JSON array in `text` as exactly n five-number vectors and
/// clamps them. Gait weights are not forced one-hot. Throws LlmParseError.
std::vector<TaskVector> parse_candidates(std::string_view text, std::size_t n,
                                         const TaskRanges& ranges = {});

/// Prompt, call and parse, retrying parse failures up to `max_retries` times
/// with a corrective follow-up. Throws LlmRetriesExhausted or
/// LlmTransportError.
std::vector<TaskVector> llm_candidates(const CandidateRequest& request, ChatProvider& provider,
                                       std::size_t max_retries, const TaskRanges& ranges = {});

/// Regenerates candidates after the user watched `previous` and wrote
/// `feedback`.
std::vector<TaskVector> refine_candidates(const CandidateRequest& request,
                                          std::span<const TaskVector> previous,
                                          std::string_view feedback, ChatProvider& provider,
                                          std::size_t max_retries, const TaskRanges& ranges = {});

std::string build_rerank_prompt(std::string_view instruction, std::span<const TaskVector> candidates);

/// Parses the last JSON array in `text` as a permutation of 0..n-1.
std::vector<std::size_t> parse_ranking(std::string_view text, std::size_t n);

/// Asks the model to order its own candidates best-first.
std::vector<std::size_t> llm_rerank(std::string_view instruction, std::span<const TaskVector> candidates,
                                    ChatProvider& provider, std::size_t max_retries);

}  // namespace lgpl
