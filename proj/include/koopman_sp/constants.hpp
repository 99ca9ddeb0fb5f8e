#pragma once

#include <cmath>
#include <numbers>

#include "koopman_sp/types.hpp"

namespace koopman_sp {

/// Singular-limit constants of the van der Pol relaxation oscillation, from their
/// closed forms.
struct SingularConstants {
  /// Period of the constrained (jump) cycle, 3 - 2 ln 2.
  static double T0() { return 3.0 - 2.0 * std::numbers::ln2; }
  /// Drop point to singular point transit time, 3/2 - ln 2.
  static double half_T0() { return 1.5 - std::numbers::ln2; }
  static double omega0() { return 2.0 * std::numbers::pi / T0(); }
  /// Leading coefficient of the Floquet exponent, nu ~ nu0 / eps.
  static double nu0() { return (-1.5 - 2.0 * std::numbers::ln2) / T0(); }

  static constexpr State jump_minus{-1.0, 2.0 / 3.0};
  static constexpr State jump_plus{1.0, -2.0 / 3.0};
  static constexpr State drop_plus{2.0, 2.0 / 3.0};
  static constexpr State drop_minus{-2.0, -2.0 / 3.0};
};

}  // namespace koopman_sp
