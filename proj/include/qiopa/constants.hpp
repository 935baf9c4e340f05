#pragma once

#include <numbers>

namespace qiopa::constants {

// Fixed literals so that every derived quantity is bit-reproducible
// across builds and platforms.

/// Reduced Planck constant [J s].
inline constexpr double hbar = 1.0546e-34;

/// Boltzmann constant [J/K].
inline constexpr double k_B = 1.3807e-23;

/// Speed of light in vacuum [m/s].
inline constexpr double c_light = 2.99792458e8;

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * pi;

} // namespace qiopa::constants
