#include "lgpl/gait.hpp"

#include <cmath>
#include <stdexcept>

namespace lgpl {

namespace {

struct PairTable {
  std::array<Foot, 2> a;
  std::array<Foot, 2> b;
};

PairTable pairs_for(Gait gait) {
  switch (gait) {
    case Gait::kTrot:
      return {{kFrontLeft, kRearRight}, {kFrontRight, kRearLeft}};
    case Gait::kPace:
      return {{kFrontLeft, kRearLeft}, {kFrontRight, kRearRight}};
    case Gait::kBound:
      return {{kFrontLeft, kFrontRight}, {kRearLeft, kRearRight}};
  }
  throw std::invalid_argument("unknown gait id " + std::to_string(static_cast<int>(gait)));
}

}  // namespace

Gait gait_from_index(std::size_t index) {
  if (index > 2) throw std::invalid_argument("unknown gait index " + std::to_string(index));
  return static_cast<Gait>(index);
}

Gait parse_gait(std::string_view name) {
  if (name == "trot") return Gait::kTrot;
  if (name == "pace") return Gait::kPace;
  if (name == "bound") return Gait::kBound;
  throw std::invalid_argument("unknown gait '" + std::string(name) + "'");
}

std::string_view gait_name(Gait gait) {
  switch (gait) {
    case Gait::kTrot: return "trot";
    case Gait::kPace: return "pace";
    case Gait::kBound: return "bound";
  }
  throw std::invalid_argument("unknown gait id " + std::to_string(static_cast<int>(gait)));
}

Contacts contact_pattern(Gait gait, double phase, double duty) {
  const PairTable table = pairs_for(gait);
  if (!(phase >= 0.0 && phase < 1.0)) throw std::invalid_argument("phase must lie in [0, 1)");
  if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("duty must lie in (0, 1)");

  const bool a_stance = phase < duty;
  const double shifted = std::fmod(phase + 0.5, 1.0);
  const bool b_stance = shifted < duty;

  Contacts c{};
  for (Foot f : table.a) c[f] = a_stance;
  for (Foot f : table.b) c[f] = b_stance;
  return c;
}

double match_fraction(Gait gait, const TimeStep& step, double duty) {
  const Contacts expected = contact_pattern(gait, step.phase, duty);
  int matches = 0;
  for (std::size_t f = 0; f < expected.size(); ++f) {
    if (expected[f] == step.contacts[f]) ++matches;
  }
  return matches / 4.0;
}

}  // namespace lgpl
