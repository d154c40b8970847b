#include "lgpl/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lgpl {

namespace {

std::string format_vector(const TaskVector& omega) { return nlohmann::json(omega).dump(); }

// Locates the last balanced JSON array in free text and parses it.
nlohmann::json last_json_array(std::string_view text) {
  for (std::size_t close = text.rfind(']'); close != std::string_view::npos;
       close = close == 0 ? std::string_view::npos : text.rfind(']', close - 1)) {
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
      if (text[i] == ']') {
        ++depth;
      } else if (text[i] == '[') {
        if (--depth == 0) {
          auto parsed = nlohmann::json::parse(text.substr(i, close - i + 1), nullptr, false);
          if (!parsed.is_discarded() && parsed.is_array()) return parsed;
          break;
        }
      }
    }
  }
  throw LlmParseError("no parseable JSON array in model response", std::string(text));
}

template <typename Result, typename Parse>
Result ask_with_retries(std::vector<ChatMessage> messages, ChatProvider& provider,
                        std::size_t max_retries, const std::string& corrective, Parse parse) {
  std::string last;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    last = provider.complete(messages);
    try {
      return parse(last);
    } catch (const LlmParseError& e) {
      last_error = e.what();
      messages.push_back({"assistant", last});
      messages.push_back({"user", "Your answer could not be used (" + last_error + "). " + corrective});
    }
  }
  throw LlmRetriesExhausted("retries exhausted after " + std::to_string(max_retries + 1) +
                                " attempts; last error: " + last_error,
                            last);
}

std::string candidate_corrective(std::size_t n) {
  return "Reply again and end with a single line holding a JSON array of exactly " +
         std::to_string(n) + " arrays, each with 5 numbers [velocity, pitch, trot, pace, bound].";
}

}  // namespace

std::vector<InContextExample> default_in_context_examples() {
  auto ex = [](std::string d, TaskArray v) { return InContextExample{std::move(d), TaskVector::from_array(v)}; };
  return {
      ex("slow cautious walk", {0.3, -0.1, 1, 0, 0}),
      ex("brisk confident trot", {1.0, 0.05, 1, 0, 0}),
      ex("lazy side-to-side shuffle", {0.4, 0.0, 0, 1, 0}),
      ex("energetic bounding run with the chest up", {1.4, 0.25, 0, 0, 1}),
      ex("sneaking low to the ground", {0.5, -0.3, 0, 1, 0}),
      ex("playful hopping in place", {0.2, 0.15, 0, 0, 1}),
  };
}

void to_json(nlohmann::json& j, const InContextExample& example) {
  j = {{"description", example.description}, {"omega", example.omega}};
}

void from_json(const nlohmann::json& j, InContextExample& example) {
  example.description = j.at("description").get<std::string>();
  example.omega = j.at("omega").get<TaskVector>();
  if (example.description.empty()) throw std::invalid_argument("in-context example needs a description");
  if (!within_ranges(example.omega)) throw std::invalid_argument("in-context example out of range");
}

std::vector<TaskVector> sample_uniform(std::size_t n, const TaskRanges& ranges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> velocity(ranges.velocity_min, ranges.velocity_max);
  std::uniform_real_distribution<double> pitch(ranges.pitch_min, ranges.pitch_max);
  std::uniform_int_distribution<std::size_t> gait(0, kNumGaits - 1);

  std::vector<TaskVector> out(n);
  for (auto& omega : out) {
    omega.velocity = velocity(rng);
    omega.pitch = pitch(rng);
    omega.gait_weights[gait(rng)] = 1.0;
  }
  return out;
}

std::vector<TaskVector> sample_perturbed(const TaskVector& omega_star, double sigma, std::size_t n,
                                         std::uint64_t seed, const TaskRanges& ranges) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  const TaskVector base = project_for_deployment(omega_star, ranges);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution resample(std::min(1.0, 2.0 * sigma));
  std::uniform_int_distribution<std::size_t> gait(0, kNumGaits - 1);

  std::vector<TaskVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TaskVector omega = base;
    omega.velocity += sigma * noise(rng);
    omega.pitch += sigma * noise(rng);
    if (resample(rng)) {
      omega.gait_weights = {0.0, 0.0, 0.0};
      omega.gait_weights[gait(rng)] = 1.0;
    }
    out.push_back(project_for_deployment(omega, ranges));
  }
  return out;
}

std::string build_prompt(const CandidateRequest& request, const TaskRanges& ranges) {
  std::ostringstream p;
  p << "You control a small quadruped robot through a task vector with 5 numbers:\n"
    << "  [velocity, pitch, trot, pace, bound]\n"
    << "- velocity: forward speed in m/s, between " << ranges.velocity_min << " and "
    << ranges.velocity_max << "\n"
    << "- pitch: body pitch in radians, between " << ranges.pitch_min << " and " << ranges.pitch_max
    << " (positive lifts the chest, negative lowers it)\n"
    << "- trot, pace, bound: gait weights between 0 and 1; the largest one selects the gait "
       "(trot = diagonal legs together, pace = legs on the same side together, bound = front legs "
       "then rear legs)\n\n"
    << "Here are behaviors an expert already described, with their task vectors:\n";
  for (const auto& ex : request.examples) {
    p << "- \"" << ex.description << "\" -> " << format_vector(ex.omega) << "\n";
  }
  p << "\nThe user wants: \"" << request.instruction << "\"\n\n"
    << "Propose exactly " << request.n << " diverse candidate task vectors for this behavior. "
    << request.diversity_note << "\n\n"
    << "Think step by step first: describe which aspects of locomotion (speed, posture, gait) "
       "matter for this behavior and how each candidate explores them. Then, as the final line "
       "of your answer, output a JSON array of exactly "
    << request.n << " arrays of 5 numbers each, for example [[v, p, t, pa, b], ...].";
  return p.str();
}

std::vector<TaskVector> parse_candidates(std::string_view text, std::size_t n, const TaskRanges& ranges) {
  const nlohmann::json arr = last_json_array(text);
  if (arr.size() != n) {
    throw LlmParseError("expected " + std::to_string(n) + " candidates, got " + std::to_string(arr.size()),
                        std::string(text));
  }
  std::vector<TaskVector> out;
  out.reserve(n);
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != kTaskDim) {
      throw LlmParseError("each candidate must be an array of 5 numbers, got " + item.dump(),
                          std::string(text));
    }
    TaskArray values{};
    for (std::size_t i = 0; i < kTaskDim; ++i) {
      if (!item[i].is_number() || !std::isfinite(item[i].get<double>())) {
        throw LlmParseError("non-finite or non-numeric entry in " + item.dump(), std::string(text));
      }
      values[i] = item[i].get<double>();
    }
    out.push_back(clamp_to_ranges(TaskVector::from_array(values), ranges));
  }
  return out;
}

std::vector<TaskVector> llm_candidates(const CandidateRequest& request, ChatProvider& provider,
                                       std::size_t max_retries, const TaskRanges& ranges) {
  if (request.n < 2) throw std::invalid_argument("candidate requests need n >= 2");
  std::vector<ChatMessage> messages{{"user", build_prompt(request, ranges)}};
  return ask_with_retries<std::vector<TaskVector>>(
      std::move(messages), provider, max_retries, candidate_corrective(request.n),
      [&](const std::string& text) { return parse_candidates(text, request.n, ranges); });
}

std::vector<TaskVector> refine_candidates(const CandidateRequest& request,
                                          std::span<const TaskVector> previous,
                                          std::string_view feedback, ChatProvider& provider,
                                          std::size_t max_retries, const TaskRanges& ranges) {
  nlohmann::json prior = nlohmann::json::array();
  for (const auto& omega : previous) prior.push_back(omega);
  std::vector<ChatMessage> messages{
      {"user", build_prompt(request, ranges)},
      {"assistant", prior.dump()},
      {"user", "The user watched these behaviors and says: \"" + std::string(feedback) +
                   "\". Revise the candidates accordingly. " + candidate_corrective(request.n)},
  };
  return ask_with_retries<std::vector<TaskVector>>(
      std::move(messages), provider, max_retries, candidate_corrective(request.n),
      [&](const std::string& text) { return parse_candidates(text, request.n, ranges); });
}

std::string build_rerank_prompt(std::string_view instruction, std::span<const TaskVector> candidates) {
  std::ostringstream p;
  p << "A quadruped robot is commanded with task vectors [velocity, pitch, trot, pace, bound].\n"
    << "The user wants: \"" << instruction << "\"\n\nCandidates:\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    p << "  " << i << ": " << format_vector(candidates[i]) << "\n";
  }
  p << "\nThink step by step about how well each candidate matches the request, then rank them "
       "from best to worst. As the final line, output a JSON array with the "
    << candidates.size() << " candidate indices in ranked order, for example [2, 0, 1].";
  return p.str();
}

std::vector<std::size_t> parse_ranking(std::string_view text, std::size_t n) {
  const nlohmann::json arr = last_json_array(text);
  if (arr.size() != n) {
    throw LlmParseError("ranking must list " + std::to_string(n) + " indices", std::string(text));
  }
  std::vector<std::size_t> ranking;
  std::vector<bool> seen(n, false);
  for (const auto& item : arr) {
    if (!item.is_number_integer()) throw LlmParseError("ranking entries must be integers", std::string(text));
    const auto idx = item.get<long long>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
      throw LlmParseError("ranking index " + std::to_string(idx) + " out of range", std::string(text));
    }
    if (seen[idx]) throw LlmParseError("ranking is not a permutation", std::string(text));
    seen[idx] = true;
    ranking.push_back(static_cast<std::size_t>(idx));
  }
  return ranking;
}

std::vector<std::size_t> llm_rerank(std::string_view instruction, std::span<const TaskVector> candidates,
                                    ChatProvider& provider, std::size_t max_retries) {
  if (candidates.size() < 2) throw std::invalid_argument("re-ranking needs at least 2 candidates");
  const std::size_t n = candidates.size();
  std::vector<ChatMessage> messages{{"user", build_rerank_prompt(instruction, candidates)}};
  return ask_with_retries<std::vector<std::size_t>>(
      std::move(messages), provider, max_retries,
      "End with a JSON array that is a permutation of 0.." + std::to_string(n - 1) + ".",
      [&](const std::string& text) { return parse_ranking(text, n); });
}

}  // namespace lgpl
