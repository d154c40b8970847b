// bench: runs the preference-learning sweep, emits single rollouts, prints
// reports, and helps author mock-LLM fixtures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lgpl/experiment.hpp"

namespace fs = std::filesystem;
using namespace lgpl;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::size_t> parse_budgets(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

int run_command(const std::string& config_path, const std::string& out_dir, const std::string& mock,
                const std::vector<std::string>& methods, const std::string& budgets, int seeds, int jobs,
                const std::string& api_key_env) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    config = experiment_config_from_json(read_json(config_path), fs::path(config_path).parent_path());
  }
  if (!mock.empty()) config.mock_fixture = mock;
  if (!methods.empty()) {
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(parse_method(m));
  }
  if (!budgets.empty()) config.query_budgets = parse_budgets(budgets);
  if (seeds > 0) config.seeds = static_cast<std::size_t>(seeds);
  if (jobs > 0) config.jobs = static_cast<std::size_t>(jobs);
  if (!api_key_env.empty()) {
    if (!config.endpoint) config.endpoint = ChatEndpointConfig{};
    config.endpoint->api_key_env_var = api_key_env;
  }

  const ExperimentResult result = run_experiment(config);
  const fs::path out(out_dir);
  write_text(out / "results.json", result_to_json(result, config).dump(2) + "\n");
  write_text(out / "aggregates.csv", aggregates_csv(result.aggregates));
  std::cout << format_report(result);
  for (const auto& c : result.cells) {
    if (!c.error.empty()) {
      std::cerr << "cell " << c.task << '/' << method_name(c.method) << '/' << c.budget << '/'
                << c.replicate << " failed: " << c.error << '\n';
    }
  }
  return result.failures == 0 ? 0 : 1;
}

int rollout_command(const std::vector<double>& omega_values, const std::string& out_path,
                    std::uint64_t seed, double noise, std::size_t steps, double dt) {
  if (omega_values.size() != kTaskDim) throw std::invalid_argument("--omega takes exactly 5 numbers");
  const TaskVector raw = TaskVector::from_array(std::span<const double, kTaskDim>(omega_values.data(), kTaskDim));
  RolloutConfig rc;
  rc.noise_sigma = noise;
  rc.steps = steps;
  rc.dt = dt;
  const Trajectory traj = rollout(project_for_deployment(raw), rc, seed);
  const std::string text = serialize_trajectory(traj).dump() + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  return 0;
}

int report_command(const std::string& in_dir) {
  const ExperimentResult result = result_from_json(read_json(fs::path(in_dir) / "results.json"));
  std::cout << format_report(result);
  return 0;
}

// Builds a by_hash mock fixture from canned completions keyed
// "<task>/<budget>" (candidate generation) and "<task>/<budget>/rerank".
int mock_fixture_command(const std::string& config_path, const std::string& responses_path,
                         const std::string& out_path) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    config = experiment_config_from_json(read_json(config_path), fs::path(config_path).parent_path());
  }
  const nlohmann::json responses = read_json(responses_path);
  nlohmann::json by_hash = nlohmann::json::object();
  for (const auto& task : config.tasks) {
    for (std::size_t budget : config.query_budgets) {
      const std::string key = task.name + "/" + std::to_string(budget);
      if (!responses.contains(key)) continue;
      CandidateRequest request;
      request.instruction = task.effective_instruction();
      request.n = budget;
      request.examples = config.params.examples;
      const std::vector<ChatMessage> messages{{"user", build_prompt(request, config.params.ranges)}};
      const std::string text = responses.at(key).get<std::string>();
      by_hash[MockChatProvider::request_key(messages)] = text;

      if (responses.contains(key + "/rerank")) {
        const auto candidates = parse_candidates(text, budget, config.params.ranges);
        const std::vector<ChatMessage> rerank{
            {"user", build_rerank_prompt(task.effective_instruction(), candidates)}};
        by_hash[MockChatProvider::request_key(rerank)] = responses.at(key + "/rerank").get<std::string>();
      }
    }
  }
  write_text(out_path, nlohmann::json{{"by_hash", by_hash}}.dump(2) + "\n");
  std::cout << "wrote " << by_hash.size() << " canned responses to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-learning benchmark for quadruped gait parameterizations"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "results", mock, budgets, api_key_env;
  std::vector<std::string> methods;
  int seeds = 0, jobs = 0;
  auto* run = app.add_subcommand("run", "Run the full tasks x methods x budgets x seeds sweep");
  run->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory for results.json and aggregates.csv");
  run->add_option("--mock-llm", mock, "Mock LLM fixture JSON")->check(CLI::ExistingFile);
  run->add_option("--methods", methods, "Subset of lgpl, pl, l2r, lpl, lgpl_perturbed");
  run->add_option("--budgets", budgets, "Comma-separated query budgets, e.g. 4,8,12");
  run->add_option("--seeds", seeds, "Replicates per cell");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--api-key-env", api_key_env, "Environment variable holding the LLM API key");

  std::vector<double> omega;
  std::string rollout_out;
  std::uint64_t seed = 0;
  double noise = 0.0, dt = 0.02;
  std::size_t steps = 100;
  auto* roll = app.add_subcommand("rollout", "Emit one trajectory JSON for a task vector");
  roll->add_option("--omega", omega, "velocity pitch trot pace bound")->required()->expected(5);
  roll->add_option("--out", rollout_out, "Output file (default stdout)");
  roll->add_option("--seed", seed, "Noise seed");
  roll->add_option("--noise", noise, "Measurement noise std");
  roll->add_option("--steps", steps, "Trajectory length T");
  roll->add_option("--dt", dt, "Time step in seconds");

  std::string in_dir;
  auto* report = app.add_subcommand("report", "Print the aggregate table of a finished run");
  report->add_option("--in", in_dir, "Directory holding results.json")->required();

  std::string responses_path, fixture_out;
  std::string fixture_config;
  auto* fixture = app.add_subcommand("mock-fixture", "Key canned LLM responses by request hash");
  fixture->add_option("--config", fixture_config, "Experiment config JSON")->check(CLI::ExistingFile);
  fixture->add_option("--responses", responses_path, "JSON map task/budget[/rerank] -> text")->required();
  fixture->add_option("--out", fixture_out, "Fixture output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, out_dir, mock, methods, budgets, seeds, jobs, api_key_env);
    if (*roll) return rollout_command(omega, rollout_out, seed, noise, steps, dt);
    if (*report) return report_command(in_dir);
    if (*fixture) return mock_fixture_command(fixture_config, responses_path, fixture_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
