#include <doctest.h>

#include <cmath>

#include "lgpl/reward.hpp"
#include "lgpl/trajectory.hpp"

using namespace lgpl;

namespace {

TaskVector cmd(double v, double rho, Gait gait) {
  TaskVector omega;
  omega.velocity = v;
  omega.pitch = rho;
  omega.gait_weights[static_cast<std::size_t>(gait)] = 1.0;
  return omega;
}

int stance_count(const Contacts& c) {
  int n = 0;
  for (bool b : c) n += b ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("contact pattern examples") {
  CHECK(contact_pattern(Gait::kTrot, 0.25) == Contacts{true, false, false, true});
  CHECK(contact_pattern(Gait::kTrot, 0.75) == Contacts{false, true, true, false});
  CHECK(contact_pattern(Gait::kBound, 0.75) == Contacts{false, false, true, true});
  CHECK(contact_pattern(Gait::kBound, 0.0) == Contacts{true, true, false, false});
  CHECK(contact_pattern(Gait::kPace, 0.0) == Contacts{true, false, true, false});
  CHECK(contact_pattern(Gait::kPace, 0.5) == Contacts{false, true, false, true});
}

TEST_CASE("contact pattern rejects bad input") {
  CHECK_THROWS_AS(contact_pattern(static_cast<Gait>(7), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_pattern(Gait::kTrot, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(contact_pattern(Gait::kTrot, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_pattern(Gait::kTrot, 0.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_gait("gallop"), std::invalid_argument);
  CHECK(parse_gait("bound") == Gait::kBound);
  CHECK(gait_name(Gait::kPace) == "pace");
}

TEST_CASE("pairs at nominal duty are in antiphase") {
  for (Gait g : {Gait::kTrot, Gait::kPace, Gait::kBound}) {
    for (int i = 0; i < 100; ++i) {
      const double phase = i / 100.0;
      const Contacts c = contact_pattern(g, phase);
      CHECK(stance_count(c) == 2);
      const Contacts later = contact_pattern(g, std::fmod(phase + 0.5, 1.0));
      for (std::size_t f = 0; f < 4; ++f) CHECK(c[f] != later[f]);
    }
  }
}

TEST_CASE("match fraction") {
  TimeStep s;
  s.phase = 0.25;
  s.contacts = {true, false, false, true};
  CHECK(match_fraction(Gait::kTrot, s) == 1.0);
  CHECK(match_fraction(Gait::kPace, s) == 0.5);
  CHECK(match_fraction(Gait::kBound, s) == 0.5);
  s.contacts = {false, true, true, false};
  CHECK(match_fraction(Gait::kTrot, s) == 0.0);
}

TEST_CASE("rollout converges to the command") {
  const Trajectory traj = rollout(cmd(1.0, 0.2, Gait::kTrot), RolloutConfig{}, 0);
  REQUIRE(traj.steps.size() == 100);
  for (std::size_t t = 50; t < traj.steps.size(); ++t) {
    CHECK(std::abs(traj.steps[t].v - 1.0) < 0.01);
    CHECK(std::abs(traj.steps[t].rho - 0.2) < 0.002);
  }
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const double bound = std::exp(-static_cast<double>(t) * 0.02 / 0.2);
    CHECK(std::abs(traj.steps[t].v - 1.0) <= bound * 1.0 + 1e-12);
    CHECK(std::abs(traj.steps[t].rho - 0.2) <= bound * 0.2 + 1e-12);
  }
  CHECK(traj.steps.front().v == 0.0);
}

TEST_CASE("rollout is deterministic per seed") {
  RolloutConfig rc;
  rc.noise_sigma = 0.05;
  const TaskVector omega = cmd(0.7, -0.1, Gait::kPace);
  CHECK(rollout(omega, rc, 12) == rollout(omega, rc, 12));
  CHECK(rollout(omega, rc, 12).steps != rollout(omega, rc, 13).steps);
  CHECK(rollout(omega, rc, 12).id != rollout(omega, rc, 13).id);
  CHECK(rollout(omega, rc, 12, "named").id == "named");
}

// 2.5 Hz at dt = 0.02 gives a 20-step cycle, so the halves split evenly.
TEST_CASE("each foot is in stance half of the time over whole even cycles") {
  RolloutConfig rc;
  rc.freq_hz = 2.5;
  for (Gait g : {Gait::kTrot, Gait::kPace, Gait::kBound}) {
    const Trajectory traj = rollout(cmd(1.0, 0.0, g), rc, 1);
    for (std::size_t f = 0; f < 4; ++f) {
      int stance = 0;
      for (const auto& s : traj.steps) stance += s.contacts[f] ? 1 : 0;
      CHECK(std::abs(stance - 50) <= 1);
    }
  }
}

// The default 2 Hz cycle is 25 steps: pair A takes 13 of them, pair B 12.
TEST_CASE("odd cycle length skews stance by half a step per cycle") {
  for (Gait g : {Gait::kTrot, Gait::kPace, Gait::kBound}) {
    const Trajectory traj = rollout(cmd(1.0, 0.0, g), RolloutConfig{}, 1);
    const Contacts first = contact_pattern(g, 0.0);
    for (std::size_t f = 0; f < 4; ++f) {
      int stance = 0;
      for (const auto& s : traj.steps) stance += s.contacts[f] ? 1 : 0;
      CHECK(stance == (first[f] ? 52 : 48));
    }
  }
}

TEST_CASE("rollout contacts follow the commanded pattern at every step") {
  RolloutConfig rc;
  rc.noise_sigma = 0.1;
  for (Gait g : {Gait::kTrot, Gait::kPace, Gait::kBound}) {
    const Trajectory traj = rollout(cmd(1.0, 0.0, g), rc, 3);
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
      const auto& s = traj.steps[t];
      const double expected_phase = std::fmod(t * 2.0 * 0.02, 1.0);
      CHECK(std::abs(s.phase - expected_phase) < 1e-9);
      CHECK(match_fraction(g, s) == 1.0);
    }
  }
}

TEST_CASE("rollout requires a one-hot gait") {
  TaskVector mixed = cmd(1.0, 0.0, Gait::kTrot);
  mixed.gait_weights[1] = 0.5;
  CHECK_THROWS_AS(rollout(mixed, RolloutConfig{}, 0), std::invalid_argument);
  RolloutConfig bad;
  bad.steps = 0;
  CHECK_THROWS_AS(rollout(cmd(1, 0, Gait::kTrot), bad, 0), std::invalid_argument);
}

// Return of a noise-free rollout under a fixed target is a quadratic in the
// commanded velocity with vertex target * sum(1 - d_t) / sum((1 - d_t)^2),
// d_t = exp(-t dt / tau). The grid maximizer must be the grid point nearest
// that vertex, and the commanded gait must match the target's.
TEST_CASE("grid search over commands recovers the analytic return maximizer") {
  const TaskVector target = cmd(1.0, 0.2, Gait::kBound);
  const RewardWeights w;
  double s1 = 0.0, s2 = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double one_minus_d = 1.0 - std::exp(-t * 0.02 / 0.2);
    s1 += one_minus_d;
    s2 += one_minus_d * one_minus_d;
  }
  const double v_vertex = target.velocity * s1 / s2;
  const double rho_vertex = target.pitch * s1 / s2;

  double best = -1e300;
  TaskVector best_cmd;
  for (int g = 0; g < 3; ++g) {
    for (int iv = 0; iv <= 30; ++iv) {
      for (int ir = -8; ir <= 8; ++ir) {
        const TaskVector c = cmd(iv * 0.05, ir * 0.05, gait_from_index(g));
        const double ret = trajectory_return(rollout(c, RolloutConfig{}, 0).steps, target, w);
        if (ret > best) {
          best = ret;
          best_cmd = c;
        }
      }
    }
  }
  CHECK(dominant_gait_index(best_cmd) == 2);
  CHECK(std::abs(best_cmd.velocity - v_vertex) <= 0.025 + 1e-9);
  CHECK(std::abs(best_cmd.pitch - rho_vertex) <= 0.025 + 1e-9);
}

TEST_CASE("trajectory JSON round trip") {
  RolloutConfig rc;
  rc.noise_sigma = 0.03;
  rc.steps = 37;
  const Trajectory traj = rollout(cmd(0.4, -0.3, Gait::kPace), rc, 99);
  const nlohmann::json j = serialize_trajectory(traj);
  CHECK(j.at("steps").size() == 37);
  for (const auto& s : j.at("steps")) {
    REQUIRE(s.at("contacts").size() == 4);
    for (const auto& c : s.at("contacts")) CHECK((c == 0 || c == 1));
  }
  const Trajectory back = deserialize_trajectory(nlohmann::json::parse(j.dump()));
  CHECK(back == traj);
  CHECK_THROWS(deserialize_trajectory(nlohmann::json::parse(R"({"id":"x"})")));
}
