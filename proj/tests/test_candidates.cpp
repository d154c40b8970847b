#include <doctest.h>

#include <array>
#include <cmath>

#include "lgpl/candidates.hpp"

using namespace lgpl;

namespace {

MockChatProvider sequence_mock(std::vector<std::string> texts) {
  return MockChatProvider(nlohmann::json{{"sequence", std::move(texts)}});
}

const char* kFourCandidates =
    "The user wants a calm walk, so speeds should be low and the chest level.\n"
    "[[0.3, -0.1, 1, 0, 0], [0.4, 0.0, 0, 1, 0], [0.2, -0.2, 0.8, 0.1, 0.1], [0.5, 0.1, 0, 0, 1]]";

double distance2(const TaskVector& a, const TaskVector& b) { return 5.0 * mse(a, b); }

}  // namespace

TEST_CASE("uniform samples are in range, one-hot and seeded") {
  const TaskRanges ranges;
  const auto a = sample_uniform(50, ranges, 3);
  CHECK(a.size() == 50);
  for (const auto& c : a) {
    CHECK(within_ranges(c));
    CHECK(has_one_hot_gait(c));
  }
  CHECK(a == sample_uniform(50, ranges, 3));
  CHECK(a != sample_uniform(50, ranges, 4));
}

TEST_CASE("uniform gait frequencies are balanced") {
  const auto s = sample_uniform(3000, TaskRanges{}, 11);
  std::array<int, 3> counts{};
  for (const auto& c : s) ++counts[dominant_gait_index(c)];
  for (int n : counts) {
    CHECK(n / 3000.0 >= 0.30);
    CHECK(n / 3000.0 <= 0.37);
  }
}

TEST_CASE("perturbed sampling") {
  const TaskVector star = TaskVector::from_array(TaskArray{1.0, 0.2, 1, 0, 0});
  for (const auto& c : sample_perturbed(star, 0.0, 6, 1)) CHECK(c == star);

  const auto s = sample_perturbed(star, 0.3, 40, 2);
  for (const auto& c : s) {
    CHECK(within_ranges(c));
    CHECK(has_one_hot_gait(c));
  }
  CHECK(s == sample_perturbed(star, 0.3, 40, 2));
  CHECK_THROWS_AS(sample_perturbed(star, -0.1, 4, 0), std::invalid_argument);
}

TEST_CASE("perturbed candidates sit closer to the target than uniform ones") {
  const TaskVector star = TaskVector::from_array(TaskArray{0.8, -0.3, 0, 1, 0});
  double mean_min_perturbed = 0.0, mean_min_uniform = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = sample_perturbed(star, 0.1, 8, seed);
    const auto u = sample_uniform(8, TaskRanges{}, seed);
    double mean_p = 0.0, mean_u = 0.0, min_p = 1e9, min_u = 1e9;
    for (std::size_t i = 0; i < 8; ++i) {
      mean_p += mse(p[i], star) / 8.0;
      mean_u += mse(u[i], star) / 8.0;
      min_p = std::min(min_p, distance2(p[i], star));
      min_u = std::min(min_u, distance2(u[i], star));
    }
    CHECK(mean_p < mean_u);
    mean_min_perturbed += min_p / 10.0;
    mean_min_uniform += min_u / 10.0;
  }
  CHECK(mean_min_perturbed < mean_min_uniform);
}

TEST_CASE("prompt carries the instruction, examples and count") {
  CandidateRequest req;
  req.instruction = "walk like you are sneaking";
  req.n = 6;
  req.examples = default_in_context_examples();
  const std::string prompt = build_prompt(req);
  CHECK(prompt.find("walk like you are sneaking") != std::string::npos);
  CHECK(prompt.find("exactly 6") != std::string::npos);
  CHECK(prompt.find("step by step") != std::string::npos);
  for (const auto& ex : req.examples) CHECK(prompt.find(ex.description) != std::string::npos);
  CHECK(req.examples.size() >= 3);
}

TEST_CASE("parse candidates") {
  const auto c = parse_candidates(kFourCandidates, 4);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == TaskVector::from_array(TaskArray{0.3, -0.1, 1, 0, 0}));
  // Mixed gait weights are kept; only the deployment step makes them one-hot.
  CHECK(c[2].gait_weights[0] == 0.8);

  const auto clamped = parse_candidates("[[9, -9, 2, -1, 0.5], [0, 0, 1, 0, 0]]", 2);
  CHECK(clamped[0] == TaskVector::from_array(TaskArray{1.5, -0.4, 1, 0, 0.5}));

  // The last array wins over arrays mentioned in the reasoning.
  const auto last = parse_candidates("e.g. [1, 2] ... final: [[0.1, 0, 0, 1, 0], [0.2, 0, 0, 0, 1]]", 2);
  CHECK(last[1].velocity == 0.2);

  CHECK_THROWS_AS(parse_candidates(kFourCandidates, 3), LlmParseError);
  CHECK_THROWS_AS(parse_candidates("[[0.1, 0, 0, 1], [0.2, 0, 0, 0, 1]]", 2), LlmParseError);
  CHECK_THROWS_AS(parse_candidates("no vectors here", 2), LlmParseError);
  CHECK_THROWS_AS(parse_candidates(R"([[0.1, 0, 0, 1, "x"], [0.2, 0, 0, 0, 1]])", 2), LlmParseError);
}

TEST_CASE("llm candidates pass through the mock") {
  auto mock = sequence_mock({kFourCandidates});
  CandidateRequest req;
  req.instruction = "calm";
  const auto c = llm_candidates(req, mock, 2);
  CHECK(c == parse_candidates(kFourCandidates, 4));
  CHECK(mock.calls() == 1);
}

TEST_CASE("a garbage reply is retried") {
  auto mock = sequence_mock({"I am not sure.", kFourCandidates});
  CandidateRequest req;
  req.instruction = "calm";
  CHECK(llm_candidates(req, mock, 2).size() == 4);
  CHECK(mock.calls() == 2);
}

TEST_CASE("retries are bounded") {
  auto mock = sequence_mock({"no", "still no", "nope", "[[1,0,1,0,0],[1,0,1,0,0],[1,0,1,0,0],[1,0,1,0,0]]"});
  CandidateRequest req;
  req.instruction = "calm";
  try {
    llm_candidates(req, mock, 2);
    FAIL("expected exhaustion");
  } catch (const LlmRetriesExhausted& e) {
    CHECK(e.last_response() == "nope");
  }
  CHECK(mock.calls() == 3);
}

TEST_CASE("running out of mock replies is a transport error") {
  auto mock = sequence_mock({});
  CandidateRequest req;
  req.instruction = "calm";
  CHECK_THROWS_AS(llm_candidates(req, mock, 2), LlmTransportError);
}

TEST_CASE("by-hash replies are keyed on the exact request") {
  CandidateRequest req;
  req.instruction = "calm";
  req.examples = default_in_context_examples();
  const std::vector<ChatMessage> messages{{"user", build_prompt(req)}};
  MockChatProvider mock(nlohmann::json{{"by_hash", {{MockChatProvider::request_key(messages), kFourCandidates}}}});
  CHECK(llm_candidates(req, mock, 0).size() == 4);
  req.instruction = "excited";
  CHECK_THROWS_AS(llm_candidates(req, mock, 0), LlmTransportError);
}

TEST_CASE("refinement sends the feedback and previous candidates") {
  auto mock = sequence_mock({kFourCandidates});
  CandidateRequest req;
  req.instruction = "calm";
  const auto previous = sample_uniform(4, TaskRanges{}, 0);
  CHECK(refine_candidates(req, previous, "slower please", mock, 1).size() == 4);
  CHECK(mock.calls() == 1);
}

TEST_CASE("rerank") {
  const auto cands = sample_uniform(3, TaskRanges{}, 1);
  const std::string prompt = build_rerank_prompt("calm", cands);
  CHECK(prompt.find("calm") != std::string::npos);
  CHECK(prompt.find("2:") != std::string::npos);

  CHECK(parse_ranking("Candidate 2 is best.\n[2, 0, 1]", 3) == std::vector<std::size_t>{2, 0, 1});
  CHECK_THROWS_AS(parse_ranking("[0, 0, 1]", 3), LlmParseError);
  CHECK_THROWS_AS(parse_ranking("[0, 1, 3]", 3), LlmParseError);
  CHECK_THROWS_AS(parse_ranking("[0, 1]", 3), LlmParseError);

  auto mock = sequence_mock({"[0, 0, 1]", "[1, 2, 0]"});
  CHECK(llm_rerank("calm", cands, mock, 1) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("in-context examples JSON") {
  const auto ex = default_in_context_examples();
  const nlohmann::json j = ex;
  const auto back = j.get<std::vector<InContextExample>>();
  REQUIRE(back.size() == ex.size());
  CHECK(back[0].description == ex[0].description);
  CHECK(back[0].omega == ex[0].omega);
}
