#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include "lgpl/experiment.hpp"

using namespace lgpl;

namespace {

PipelineParams small_params() {
  PipelineParams p;
  p.rollout.steps = 30;
  p.segment_length = 5;
  p.fit.iterations = 60;
  return p;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.params = small_params();
  c.seeds = 2;
  c.jobs = 2;
  return c;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::kLgpl, Method::kPl, Method::kL2r, Method::kLpl, Method::kLgplPerturbed}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("gpt"), ConfigurationError);
  CHECK(method_uses_llm(Method::kLpl));
  CHECK_FALSE(method_uses_llm(Method::kPl));
  CHECK_FALSE(method_uses_llm(Method::kLgplPerturbed));
}

TEST_CASE("smallest pl run") {
  PipelineParams p;
  p.rollout.steps = 3;
  p.segment_length = 2;
  const auto out = run_method(Method::kPl, default_tasks()[0], 2, 1, p, nullptr);
  CHECK(out.candidates.size() == 2);
  CHECK(out.ranking.size() == 2);
  CHECK(within_ranges(out.learned));
}

TEST_CASE("learn-to-rank returns the first LLM candidate") {
  MockChatProvider mock(nlohmann::json{
      {"sequence", {"Reasoning first.\n[[0.9, 0.1, 0, 1, 0], [0.2, 0.0, 1, 0, 0], [1.1, 0.3, 0, 0, 1]]"}}});
  const auto out = run_method(Method::kL2r, default_tasks()[1], 3, 0, small_params(), &mock);
  CHECK(out.learned == TaskVector::from_array(TaskArray{0.9, 0.1, 0, 1, 0}));
  CHECK(out.ranking.empty());
}

TEST_CASE("LLM methods need a provider") {
  CHECK_THROWS_AS(run_method(Method::kLgpl, default_tasks()[0], 4, 0, small_params(), nullptr),
                  ConfigurationError);
  ExperimentConfig c = small_config();
  c.methods = {Method::kLpl};
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
}

TEST_CASE("perturbed candidates beat uniform ones at the smallest budget") {
  const PipelineParams p;
  for (const auto& task : default_tasks()) {
    double perturbed = 0.0, uniform = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      perturbed += mse(run_method(Method::kLgplPerturbed, task, 4, seed, p, nullptr).learned, task.omega_star);
      uniform += mse(run_method(Method::kPl, task, 4, seed, p, nullptr).learned, task.omega_star);
    }
    CHECK_MESSAGE(perturbed < uniform, task.name);
  }
}

TEST_CASE("full factorial sweep") {
  const ExperimentConfig config = small_config();
  const ExperimentResult r = run_experiment(config);
  REQUIRE(r.cells.size() == 60);
  CHECK(r.failures == 0);
  std::map<std::tuple<std::string, Method, std::size_t>, int> counts;
  for (const auto& c : r.cells) {
    CHECK(c.error.empty());
    REQUIRE(c.learned.has_value());
    const auto task = std::find_if(config.tasks.begin(), config.tasks.end(),
                                   [&](const auto& t) { return t.name == c.task; });
    CHECK(c.mse == mse(*c.learned, task->omega_star));
    ++counts[{c.task, c.method, c.budget}];
  }
  CHECK(counts.size() == 30);
  for (const auto& [key, n] : counts) CHECK(n == 2);

  // Aggregates recomputed by hand.
  for (const auto& a : r.aggregates) {
    double sum = 0.0;
    std::vector<double> vals;
    for (const auto& c : r.cells) {
      if ((a.task == "all" || c.task == a.task) && c.method == a.method && c.budget == a.budget) {
        vals.push_back(c.mse);
        sum += c.mse;
      }
    }
    REQUIRE(a.count == vals.size());
    const double mean = sum / vals.size();
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    CHECK(std::abs(a.mean - mean) < 1e-12);
    CHECK(std::abs(a.stddev - std::sqrt(ss / (vals.size() - 1))) < 1e-12);
  }
  CHECK(r.find("all", Method::kPl, 8)->count == 10);
  CHECK(r.find("sad", Method::kLgplPerturbed, 12)->count == 2);
  CHECK(r.find("sad", Method::kLgpl, 12) == nullptr);
}

TEST_CASE("sweeps are deterministic regardless of thread count") {
  ExperimentConfig a = small_config();
  a.tasks.resize(2);
  a.query_budgets = {4};
  ExperimentConfig b = a;
  b.jobs = 1;
  const auto ra = run_experiment(a);
  const auto rb = run_experiment(b);
  REQUIRE(ra.cells.size() == rb.cells.size());
  for (std::size_t i = 0; i < ra.cells.size(); ++i) {
    CHECK(ra.cells[i].seed == rb.cells[i].seed);
    CHECK(*ra.cells[i].learned == *rb.cells[i].learned);
  }
  ExperimentConfig c = a;
  c.base_seed = 99;
  CHECK(run_experiment(c).cells[0].learned != ra.cells[0].learned);
}

TEST_CASE("cell seeds depend on every coordinate") {
  const auto s = cell_seed(0, "happy", Method::kPl, 4, 0);
  CHECK(s == cell_seed(0, "happy", Method::kPl, 4, 0));
  CHECK(s != cell_seed(1, "happy", Method::kPl, 4, 0));
  CHECK(s != cell_seed(0, "sad", Method::kPl, 4, 0));
  CHECK(s != cell_seed(0, "happy", Method::kLgpl, 4, 0));
  CHECK(s != cell_seed(0, "happy", Method::kPl, 8, 0));
  CHECK(s != cell_seed(0, "happy", Method::kPl, 4, 1));
}

TEST_CASE("failed cells are recorded, not thrown") {
  ExperimentConfig c = small_config();
  c.tasks.resize(1);
  c.methods = {Method::kLgpl};
  c.query_budgets = {4};
  c.seeds = 1;
  const auto fixture = std::filesystem::temp_directory_path() / "lgpl_empty_mock.json";
  { std::ofstream(fixture) << R"({"sequence": []})"; }
  c.mock_fixture = fixture;
  const auto r = run_experiment(c);
  std::filesystem::remove(fixture);
  CHECK(r.failures == 1);
  CHECK_FALSE(r.cells[0].error.empty());
  CHECK(r.aggregates.empty());
}

TEST_CASE("config JSON") {
  const auto j = nlohmann::json::parse(R"({
    "tasks": [{"name": "calm", "omega_star": [0.4, 0.0, 1, 0, 0]}],
    "methods": ["pl", "lgpl_perturbed"],
    "query_budgets": [4, 6],
    "seeds": 3,
    "base_seed": 12,
    "sim": {"T": 50, "noise_sigma": 0.01},
    "fit": {"learning_rate": 0.1, "iterations": 20, "segment_length": 10},
    "reward": {"alphas": [2, 2, 1, 1, 1]},
    "candidates": {"perturb_sigma": 0.2}
  })");
  const ExperimentConfig c = experiment_config_from_json(j);
  CHECK(c.tasks.size() == 1);
  CHECK(c.methods == std::vector<Method>{Method::kPl, Method::kLgplPerturbed});
  CHECK(c.query_budgets == std::vector<std::size_t>{4, 6});
  CHECK(c.seeds == 3);
  CHECK(c.base_seed == 12);
  CHECK(c.params.rollout.steps == 50);
  CHECK(c.params.rollout.noise_sigma == 0.01);
  CHECK(c.params.fit.iterations == 20);
  CHECK(c.params.segment_length == 10);
  CHECK(c.params.weights.alphas[0] == 2.0);
  CHECK(c.params.perturb_sigma == 0.2);
  CHECK_NOTHROW(c.validate());

  const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(c));
  CHECK(experiment_config_to_json(back) == experiment_config_to_json(c));

  CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"methods": ["magic"]})")),
                  ConfigurationError);
  CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"seeds": "many"})")), ConfigurationError);
  ExperimentConfig bad = c;
  bad.params.segment_length = 50;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
}

TEST_CASE("results JSON and CSV") {
  ExperimentConfig c = small_config();
  c.tasks.resize(1);
  c.query_budgets = {4};
  const auto r = run_experiment(c);
  const auto j = result_to_json(r, c);
  CHECK(j.at("rows").size() == 4);
  const auto back = result_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.cells.size() == r.cells.size());
  CHECK(*back.cells[0].learned == *r.cells[0].learned);
  CHECK(back.cells[0].seed == r.cells[0].seed);
  const std::string csv = aggregates_csv(r.aggregates);
  CHECK(csv.rfind("task,method,budget", 0) == 0);
  CHECK(format_report(r).find("lgpl_perturbed") != std::string::npos);
}
