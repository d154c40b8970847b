#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace lgpl {

enum class Gait { kTrot = 0, kPace = 1, kBound = 2 };

// Foot order is (FL, FR, RL, RR) everywhere, including the wire formats.
enum Foot : std::size_t { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

using Contacts = std::array<bool, 4>;

inline constexpr double kNominalDuty = 0.5;

/// One sample of a trajectory. Contacts and phase stand in for the action.
struct TimeStep {
  double v = 0.0;    // base velocity, m/s
  double rho = 0.0;  // pitch, rad
  Contacts contacts{};
  double phase = 0.0;  // gait cycle phase in [0, 1)

  bool operator==(const TimeStep&) const = default;
};

Gait gait_from_index(std::size_t index);
Gait parse_gait(std::string_view name);
std::string_view gait_name(Gait gait);

/// Stance flags for a two-beat gait. Pair A (trot: FL+RR, pace: FL+RL,
/// bound: FL+FR) is in stance for phase in [0, duty); pair B for phase in
/// [0.5, 0.5 + duty) modulo 1.
///
/// Throws std::invalid_argument for an unknown gait, a phase outside [0, 1)
/// or a duty outside (0, 1).
Contacts contact_pattern(Gait gait, double phase, double duty = kNominalDuty);

/// Fraction of the four feet whose contact flag agrees with the gait's
/// pattern at the step's phase.
double match_fraction(Gait gait, const TimeStep& step, double duty = kNominalDuty);

}  // namespace lgpl
