#pragma once

#include <cmath>

// Physical constants (CODATA 2018; k_B exact since the 2019 SI redefinition).
// All internal frequencies and rates in this library are angular (rad/s).

namespace mecs::constants {

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
inline constexpr double G_newton = 6.67430e-11;  // m^3 kg^-1 s^-2

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

// Hz as entered in configs -> angular rad/s used internally.
inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }

// Bose-Einstein occupation n = 1/(exp(hbar w / kB T) - 1).
inline double thermal_occupation(double omega_rad_s, double temperature_k) {
    const double x = hbar * omega_rad_s / (k_B * temperature_k);
    return 1.0 / std::expm1(x);
}

}  // namespace mecs::constants
