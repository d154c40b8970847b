#include <doctest.h>

#include <random>

#include "lgpl/task.hpp"

using namespace lgpl;

namespace {
TaskVector tv(TaskArray a) { return TaskVector::from_array(a); }
}  // namespace

TEST_CASE("projection picks the argmax gait") {
  CHECK(project_for_deployment(tv({0.5, 0.1, 0.7, 0.2, 0.3})) == tv({0.5, 0.1, 1, 0, 0}));
  CHECK(project_for_deployment(tv({0.5, 0.1, 0.1, 0.2, 0.9})) == tv({0.5, 0.1, 0, 0, 1}));
}

TEST_CASE("projection clamps and breaks ties toward the lowest index") {
  CHECK(project_for_deployment(tv({2.0, 0.9, 0.2, 0.2, 0.2})) == tv({1.5, 0.4, 1, 0, 0}));
  CHECK(project_for_deployment(tv({-1.0, -0.9, 0.0, 0.6, 0.6})) == tv({0.0, -0.4, 0, 1, 0}));
}

TEST_CASE("projection properties on random vectors") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const TaskVector raw = tv({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const TaskVector p = project_for_deployment(raw);
    CHECK(project_for_deployment(p) == p);
    CHECK(has_one_hot_gait(p));
    CHECK(within_ranges(p));
    CHECK(p.velocity == clamp_to_ranges(raw).velocity);
    CHECK(p.pitch == clamp_to_ranges(raw).pitch);
    const std::size_t hot = dominant_gait_index(p);
    for (std::size_t i = 0; i < kNumGaits; ++i) CHECK(raw.gait_weights[hot] >= raw.gait_weights[i]);
  }
}

TEST_CASE("mse") {
  CHECK(mse(tv({1, 0, 1, 0, 0}), tv({1, 0, 1, 0, 0})) == 0.0);
  CHECK(mse(tv({1, 0, 1, 0, 0}), tv({0, 0, 1, 0, 0})) == doctest::Approx(0.2).epsilon(1e-15));
  const TaskVector a = tv({0.3, -0.2, 0.5, 0.1, 0.9});
  const TaskVector b = tv({1.1, 0.3, 0.0, 0.7, 0.2});
  CHECK(mse(a, b) == mse(b, a));
}

TEST_CASE("task vector JSON layout is a 5-array") {
  const TaskVector omega = tv({0.5, -0.1, 1, 0, 0});
  const nlohmann::json j = omega;
  CHECK(j.dump() == "[0.5,-0.1,1.0,0.0,0.0]");
  CHECK(j.get<TaskVector>() == omega);
  CHECK_THROWS_AS(nlohmann::json::parse("[1,2,3]").get<TaskVector>(), std::invalid_argument);
  CHECK_THROWS_AS(nlohmann::json::parse(R"([1,2,3,4,"x"])").get<TaskVector>(), std::invalid_argument);
}

TEST_CASE("reward weights must be positive") {
  RewardWeights w;
  CHECK_NOTHROW(w.validate());
  w.alphas[3] = 0.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("centroid") {
  const std::vector<TaskVector> v{tv({0, 0, 1, 0, 0}), tv({1, 0.2, 0, 1, 0})};
  CHECK(centroid(v) == tv({0.5, 0.1, 0.5, 0.5, 0}));
  CHECK_THROWS(centroid(std::span<const TaskVector>{}));
}
