#include "lgpl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

#include "lgpl/hash.hpp"

namespace lgpl {

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) {
  return StableHash().add(seed).add(purpose).add(index).value();
}

std::vector<InContextExample> load_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open in-context examples " + path.string());
  return nlohmann::json::parse(in).get<std::vector<InContextExample>>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::unique_ptr<ChatProvider> make_provider(const ExperimentConfig& config) {
  if (config.mock_fixture) {
    std::ifstream in(*config.mock_fixture);
    if (!in) throw ConfigurationError("cannot open mock LLM fixture " + config.mock_fixture->string());
    return std::make_unique<MockChatProvider>(nlohmann::json::parse(in));
  }
  if (config.endpoint) return std::make_unique<HttpChatProvider>(*config.endpoint);
  return nullptr;
}

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kLgpl: return "lgpl";
    case Method::kPl: return "pl";
    case Method::kL2r: return "l2r";
    case Method::kLpl: return "lpl";
    case Method::kLgplPerturbed: return "lgpl_perturbed";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kLgpl, Method::kPl, Method::kL2r, Method::kLpl, Method::kLgplPerturbed}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigurationError("unknown method '" + std::string(name) + "'");
}

bool method_uses_llm(Method method) {
  return method == Method::kLgpl || method == Method::kL2r || method == Method::kLpl;
}

std::vector<Trajectory> rollout_candidates(std::span<const TaskVector> candidates,
                                           const RolloutConfig& rollout_config, std::uint64_t seed,
                                           const TaskRanges& ranges) {
  std::vector<Trajectory> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back(rollout(project_for_deployment(candidates[i], ranges), rollout_config,
                          sub_seed(seed, "rollout", i), "c" + std::to_string(i)));
  }
  return out;
}

FitResult learn_from_ranking(std::span<const TaskVector> candidates,
                             std::span<const Trajectory> trajectories,
                             std::span<const std::size_t> ranking, const PipelineParams& params,
                             std::uint64_t seed) {
  if (ranking.size() != trajectories.size()) {
    throw std::invalid_argument("ranking must order every candidate trajectory");
  }
  std::vector<std::string> ids;
  ids.reserve(ranking.size());
  for (std::size_t idx : ranking) {
    if (idx >= trajectories.size()) throw std::invalid_argument("ranking index out of range");
    ids.push_back(trajectories[idx].id);
  }
  const auto pairs = ranking_to_pairs(ids);
  const auto dataset = expand_subsegments(pairs, trajectories, params.segment_length,
                                          params.fit.comparison_cap, sub_seed(seed, "subsample"));
  FitConfig fit_config = params.fit;
  fit_config.init = centroid(candidates);
  fit_config.ranges = params.ranges;
  fit_config.seed = seed;
  return fit(dataset, params.weights, fit_config);
}

MethodOutcome run_method(Method method, const GroundTruthTask& task, std::size_t budget,
                         std::uint64_t seed, const PipelineParams& params, ChatProvider* provider) {
  if (method_uses_llm(method) && provider == nullptr) {
    throw ConfigurationError("method " + std::string(method_name(method)) +
                             " needs an LLM endpoint or a mock fixture");
  }
  MethodOutcome out;
  const std::uint64_t candidate_seed = sub_seed(seed, "candidates");
  switch (method) {
    case Method::kPl:
      out.candidates = sample_uniform(budget, params.ranges, candidate_seed);
      break;
    case Method::kLgplPerturbed:
      out.candidates = sample_perturbed(task.omega_star, params.perturb_sigma, budget, candidate_seed,
                                        params.ranges);
      break;
    case Method::kLgpl:
    case Method::kL2r:
    case Method::kLpl: {
      CandidateRequest request;
      request.instruction = task.effective_instruction();
      request.n = budget;
      request.examples = params.examples;
      out.candidates = llm_candidates(request, *provider, params.max_retries, params.ranges);
      break;
    }
  }

  if (method == Method::kL2r) {
    out.learned = out.candidates.front();
    return out;
  }

  const auto trajectories = rollout_candidates(out.candidates, params.rollout, seed, params.ranges);
  if (method == Method::kLpl) {
    out.ranking = llm_rerank(task.effective_instruction(), out.candidates, *provider, params.max_retries);
  } else {
    out.ranking = oracle_rank(trajectories, task, params.weights);
  }
  out.learned = learn_from_ranking(out.candidates, trajectories, out.ranking, params, seed).omega;
  return out;
}

void ExperimentConfig::validate() const {
  if (tasks.empty()) throw ConfigurationError("no tasks configured");
  if (methods.empty()) throw ConfigurationError("no methods configured");
  if (query_budgets.empty()) throw ConfigurationError("no query budgets configured");
  for (std::size_t b : query_budgets) {
    if (b < 2) throw ConfigurationError("query budgets must be at least 2");
  }
  if (seeds < 1) throw ConfigurationError("seeds must be at least 1");
  for (const auto& t : tasks) t.validate();
  params.weights.validate();
  params.rollout.validate();
  params.fit.validate();
  if (params.segment_length < 1 || params.segment_length >= params.rollout.steps) {
    throw ConfigurationError("segment_length must lie in [1, T)");
  }
  const bool needs_llm = std::any_of(methods.begin(), methods.end(), method_uses_llm);
  if (needs_llm && !mock_fixture && !endpoint) {
    throw ConfigurationError("LLM methods configured without an endpoint or mock fixture");
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    if (j.contains("tasks")) c.tasks = j.at("tasks").get<std::vector<GroundTruthTask>>();
    if (j.contains("tasks_file")) c.tasks = load_tasks(resolve(base_dir, j.at("tasks_file").get<std::string>()));
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("query_budgets")) c.query_budgets = j.at("query_budgets").get<std::vector<std::size_t>>();
    c.seeds = j.value("seeds", c.seeds);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.jobs = j.value("jobs", c.jobs);

    auto& p = c.params;
    if (j.contains("sim")) {
      const auto& s = j.at("sim");
      p.rollout.steps = s.value("T", p.rollout.steps);
      p.rollout.dt = s.value("dt", p.rollout.dt);
      p.rollout.noise_sigma = s.value("noise_sigma", p.rollout.noise_sigma);
    }
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      p.fit.learning_rate = f.value("learning_rate", p.fit.learning_rate);
      p.fit.iterations = f.value("iterations", p.fit.iterations);
      p.fit.comparison_cap = f.value("comparison_cap", p.fit.comparison_cap);
      p.segment_length = f.value("segment_length", p.segment_length);
    }
    if (j.contains("reward")) p.weights.alphas = j.at("reward").at("alphas").get<TaskArray>();
    if (j.contains("candidates")) {
      const auto& cc = j.at("candidates");
      p.perturb_sigma = cc.value("perturb_sigma", p.perturb_sigma);
      p.max_retries = cc.value("max_retries", p.max_retries);
      if (cc.contains("examples_file")) {
        p.examples = load_examples(resolve(base_dir, cc.at("examples_file").get<std::string>()));
      }
    }
    if (j.contains("endpoint")) {
      const auto& e = j.at("endpoint");
      ChatEndpointConfig ep;
      ep.base_url = e.value("base_url", ep.base_url);
      ep.model_name = e.value("model_name", ep.model_name);
      ep.api_key_env_var = e.value("api_key_env_var", ep.api_key_env_var);
      ep.timeout_seconds = e.value("timeout", ep.timeout_seconds);
      ep.max_retries = e.value("max_retries", ep.max_retries);
      ep.temperature = e.value("temperature", ep.temperature);
      p.max_retries = ep.max_retries;
      c.endpoint = ep;
    }
    if (j.contains("mock_llm")) c.mock_fixture = resolve(base_dir, j.at("mock_llm").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed experiment config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigurationError(std::string("invalid experiment config: ") + e.what());
  }
  return c;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  const auto& p = c.params;
  nlohmann::json j = {
      {"tasks", c.tasks},
      {"methods", methods},
      {"query_budgets", c.query_budgets},
      {"seeds", c.seeds},
      {"base_seed", c.base_seed},
      {"sim", {{"T", p.rollout.steps}, {"dt", p.rollout.dt}, {"noise_sigma", p.rollout.noise_sigma}}},
      {"fit",
       {{"learning_rate", p.fit.learning_rate},
        {"iterations", p.fit.iterations},
        {"comparison_cap", p.fit.comparison_cap},
        {"segment_length", p.segment_length}}},
      {"reward", {{"alphas", p.weights.alphas}}},
      {"candidates", {{"perturb_sigma", p.perturb_sigma}, {"max_retries", p.max_retries}}},
  };
  if (c.endpoint) {
    j["endpoint"] = {{"base_url", c.endpoint->base_url},
                     {"model_name", c.endpoint->model_name},
                     {"api_key_env_var", c.endpoint->api_key_env_var}};
  }
  if (c.mock_fixture) j["mock_llm"] = c.mock_fixture->filename().string();
  return j;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view task, Method method,
                        std::size_t budget, std::size_t replicate) {
  return StableHash()
      .add(base_seed)
      .add(task)
      .add(method_name(method))
      .add(static_cast<std::uint64_t>(budget))
      .add(static_cast<std::uint64_t>(replicate))
      .value();
}

const Aggregate* ExperimentResult::find(std::string_view task, Method method, std::size_t budget) const {
  for (const auto& a : aggregates) {
    if (a.task == task && a.method == method && a.budget == budget) return &a;
  }
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  struct CellSpec {
    const GroundTruthTask* task;
    Method method;
    std::size_t budget;
    std::size_t replicate;
  };
  std::vector<CellSpec> specs;
  for (const auto& task : config.tasks)
    for (Method m : config.methods)
      for (std::size_t b : config.query_budgets)
        for (std::size_t r = 0; r < config.seeds; ++r) specs.push_back({&task, m, b, r});

  std::vector<CellResult> cells(specs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      const CellSpec& spec = specs[i];
      CellResult& cell = cells[i];
      cell.task = spec.task->name;
      cell.method = spec.method;
      cell.budget = spec.budget;
      cell.replicate = spec.replicate;
      cell.seed = cell_seed(config.base_seed, spec.task->name, spec.method, spec.budget, spec.replicate);
      const auto start = std::chrono::steady_clock::now();
      try {
        // A fresh provider per cell keeps mock sequences independent of
        // scheduling order.
        std::unique_ptr<ChatProvider> provider =
            method_uses_llm(spec.method) ? make_provider(config) : nullptr;
        const MethodOutcome outcome =
            run_method(spec.method, *spec.task, spec.budget, cell.seed, config.params, provider.get());
        cell.learned = outcome.learned;
        cell.mse = mse(outcome.learned, spec.task->omega_star);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::make_tuple(a.task, method_name(a.method), a.budget, a.replicate) <
           std::make_tuple(b.task, method_name(b.method), b.budget, b.replicate);
  });

  ExperimentResult result;
  result.cells = std::move(cells);
  result.failures = static_cast<std::size_t>(std::count_if(
      result.cells.begin(), result.cells.end(), [](const CellResult& c) { return !c.error.empty(); }));
  result.aggregates = aggregate_cells(result.cells);
  return result;
}

std::vector<Aggregate> aggregate_cells(std::span<const CellResult> cells) {
  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::map<Key, std::pair<Method, std::vector<double>>> groups;
  for (const auto& c : cells) {
    if (!c.error.empty()) continue;
    const std::string m(method_name(c.method));
    groups[{c.task, m, c.budget}].first = c.method;
    groups[{c.task, m, c.budget}].second.push_back(c.mse);
    groups[{"all", m, c.budget}].first = c.method;
    groups[{"all", m, c.budget}].second.push_back(c.mse);
  }
  std::vector<Aggregate> out;
  for (const auto& [key, group] : groups) {
    const auto& values = group.second;
    Aggregate a;
    a.task = std::get<0>(key);
    a.method = group.first;
    a.budget = std::get<2>(key);
    a.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - a.mean) * (v - a.mean);
      a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.push_back(std::move(a));
  }
  return out;
}

nlohmann::json result_to_json(const ExperimentResult& result, const ExperimentConfig& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : result.cells) {
    nlohmann::json row = {{"task", c.task},
                          {"method", method_name(c.method)},
                          {"budget", c.budget},
                          {"replicate", c.replicate},
                          {"seed", to_hex(c.seed)},
                          {"wall_time", c.wall_time}};
    if (c.learned) {
      row["omega"] = *c.learned;
      row["mse"] = c.mse;
    } else {
      row["omega"] = nullptr;
      row["error"] = c.error;
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : result.aggregates) {
    aggs.push_back({{"task", a.task},
                    {"method", method_name(a.method)},
                    {"budget", a.budget},
                    {"count", a.count},
                    {"mean_mse", a.mean},
                    {"std_mse", a.stddev}});
  }
  return {{"metadata",
           {{"mse", "mean of squared differences over the 5 raw components, learned omega unprojected"},
            {"failures", result.failures},
            {"config", experiment_config_to_json(config)}}},
          {"rows", std::move(rows)},
          {"aggregates", std::move(aggs)}};
}

ExperimentResult result_from_json(const nlohmann::json& j) {
  ExperimentResult result;
  for (const auto& row : j.at("rows")) {
    CellResult c;
    c.task = row.at("task").get<std::string>();
    c.method = parse_method(row.at("method").get<std::string>());
    c.budget = row.at("budget").get<std::size_t>();
    c.replicate = row.at("replicate").get<std::size_t>();
    c.seed = std::stoull(row.at("seed").get<std::string>(), nullptr, 16);
    c.wall_time = row.value("wall_time", 0.0);
    if (!row.at("omega").is_null()) {
      c.learned = row.at("omega").get<TaskVector>();
      c.mse = row.at("mse").get<double>();
    } else {
      c.error = row.value("error", std::string("unknown failure"));
      ++result.failures;
    }
    result.cells.push_back(std::move(c));
  }
  result.aggregates = aggregate_cells(result.cells);
  return result;
}

std::string aggregates_csv(std::span<const Aggregate> aggregates) {
  std::ostringstream out;
  out << "task,method,budget,count,mean_mse,std_mse\n";
  for (const auto& a : aggregates) {
    out << a.task << ',' << method_name(a.method) << ',' << a.budget << ',' << a.count << ','
        << fmt(a.mean, 9) << ',' << fmt(a.stddev, 9) << '\n';
  }
  return out.str();
}

std::string format_report(const ExperimentResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-16s %6s %5s %12s %12s\n", "task", "method", "budget", "n",
                "mean_mse", "std_mse");
  out << line;
  for (const auto& a : result.aggregates) {
    std::snprintf(line, sizeof(line), "%-10s %-16s %6zu %5zu %12.6f %12.6f\n", a.task.c_str(),
                  std::string(method_name(a.method)).c_str(), a.budget, a.count, a.mean, a.stddev);
    out << line;
  }
  if (result.failures > 0) out << result.failures << " cell(s) failed\n";
  return out.str();
}

}  // namespace lgpl
