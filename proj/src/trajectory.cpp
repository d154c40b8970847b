#include "lgpl/trajectory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "lgpl/hash.hpp"

namespace lgpl {

namespace {

double cycle_phase(std::size_t t, double freq_hz, double dt) {
  const double cycles = static_cast<double>(t) * freq_hz * dt;
  const double nearest = std::round(cycles);
  // Whole cycles land on phase 0 even when the product rounds just below.
  if (std::abs(cycles - nearest) < 1e-9) return 0.0;
  double phase = cycles - std::floor(cycles);
  if (phase >= 1.0) phase = 0.0;
  return phase;
}

std::string derived_id(const TaskVector& omega, const RolloutConfig& config, std::uint64_t seed) {
  StableHash h;
  for (double v : omega.to_array()) h.add(nlohmann::json(v).dump());
  h.add(static_cast<std::uint64_t>(config.steps));
  h.add(nlohmann::json(config.dt).dump());
  h.add(nlohmann::json(config.noise_sigma).dump());
  h.add(seed);
  return "traj-" + h.hex();
}

}  // namespace

void RolloutConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("rollout needs at least one step");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
  if (!(freq_hz > 0.0)) throw std::invalid_argument("gait frequency must be positive");
  if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("duty must lie in (0, 1)");
  if (!(lag_tau > 0.0)) throw std::invalid_argument("lag time constant must be positive");
}

Trajectory rollout(const TaskVector& omega, const RolloutConfig& config, std::uint64_t seed,
                   std::string id) {
  config.validate();
  if (!has_one_hot_gait(omega)) {
    throw std::invalid_argument("rollout requires a one-hot gait; project the command first");
  }
  const Gait gait = gait_from_index(dominant_gait_index(omega));

  Trajectory traj;
  traj.id = id.empty() ? derived_id(omega, config, seed) : std::move(id);
  traj.dt = config.dt;
  traj.source_omega = omega;
  traj.steps.reserve(config.steps);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::size_t t = 0; t < config.steps; ++t) {
    const double decay = std::exp(-static_cast<double>(t) * config.dt / config.lag_tau);
    TimeStep step;
    step.v = omega.velocity * (1.0 - decay);
    step.rho = omega.pitch * (1.0 - decay);
    if (config.noise_sigma > 0.0) {
      step.v += config.noise_sigma * noise(rng);
      step.rho += config.noise_sigma * noise(rng);
    }
    step.phase = cycle_phase(t, config.freq_hz, config.dt);
    step.contacts = contact_pattern(gait, step.phase, config.duty);
    traj.steps.push_back(step);
  }
  return traj;
}

nlohmann::json serialize_trajectory(const Trajectory& traj) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : traj.steps) {
    nlohmann::json contacts = nlohmann::json::array();
    for (bool c : s.contacts) contacts.push_back(c ? 1 : 0);
    steps.push_back({{"v", s.v}, {"rho", s.rho}, {"contacts", std::move(contacts)}, {"phase", s.phase}});
  }
  return {{"id", traj.id}, {"dt", traj.dt}, {"source_omega", traj.source_omega}, {"steps", std::move(steps)}};
}

Trajectory deserialize_trajectory(const nlohmann::json& j) {
  try {
    Trajectory traj;
    traj.id = j.at("id").get<std::string>();
    traj.dt = j.at("dt").get<double>();
    traj.source_omega = j.at("source_omega").get<TaskVector>();
    for (const auto& s : j.at("steps")) {
      TimeStep step;
      step.v = s.at("v").get<double>();
      step.rho = s.at("rho").get<double>();
      step.phase = s.at("phase").get<double>();
      const auto& contacts = s.at("contacts");
      if (!contacts.is_array() || contacts.size() != 4) {
        throw std::invalid_argument("contacts must hold exactly 4 flags");
      }
      for (std::size_t f = 0; f < 4; ++f) {
        const int flag = contacts[f].get<int>();
        if (flag != 0 && flag != 1) throw std::invalid_argument("contact flags must be 0 or 1");
        step.contacts[f] = flag == 1;
      }
      if (!(step.phase >= 0.0 && step.phase < 1.0)) throw std::invalid_argument("phase outside [0, 1)");
      traj.steps.push_back(step);
    }
    if (!(traj.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    return traj;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed trajectory record: ") + e.what());
  }
}

}  // namespace lgpl
