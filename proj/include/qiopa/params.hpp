#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qiopa/constants.hpp"
#include "qiopa/errors.hpp"
#include "qiopa/numerics.hpp"

namespace qiopa {

/// Reduce an angle to [0, 2*pi).
inline double reduce_angle(double theta) {
    double t = std::fmod(theta, constants::two_pi);
    if (t < 0.0) t += constants::two_pi;
    if (t >= constants::two_pi) t = 0.0;
    return t;
}

/// Physical inputs of the electro-optomechanical converter.  All internal
/// frequencies are angular (rad/s); conversions from ordinary frequencies
/// happen at config-parse time.
struct PhysicalParams {
    double omega_m{};   ///< mechanical resonance (rad/s)
    double omega_w{};   ///< microwave cavity resonance (rad/s)
    double lambda_o{};  ///< optical wavelength (m); omega_o = 2 pi c / lambda
    double Q_m{};       ///< mechanical quality factor; gamma_m = omega_m / Q_m
    double kappa_w{};   ///< microwave cavity loss rate (rad/s)
    double kappa_o{};   ///< optical cavity loss rate (rad/s)
    double delta_w{};   ///< microwave detuning (rad/s)
    double delta_o{};   ///< optical detuning (rad/s)
    double g_w_bare{};  ///< single-photon electromechanical coupling (rad/s)
    double g_o_bare{};  ///< single-photon optomechanical coupling (rad/s)
    double P_w{};       ///< microwave drive power (W)
    double P_o{};       ///< optical drive power (W)
    double G{};         ///< OPA nonlinear gain (rad/s)
    double theta{};     ///< OPA pump phase, reduced to [0, 2 pi)
    double T{};         ///< environment temperature (K)

    double omega_o() const { return constants::two_pi * constants::c_light / lambda_o; }
    double gamma_m() const { return omega_m / Q_m; }
    double drive_omega_w() const { return omega_w - delta_w; }
    double drive_omega_o() const { return omega_o() - delta_o; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw PhysicsError(std::string(name) + " must be strictly positive and finite");
        };
        positive(omega_m, "omega_m");
        positive(omega_w, "omega_w");
        positive(lambda_o, "lambda_o");
        positive(Q_m, "Q_m");
        positive(kappa_w, "kappa_w");
        positive(kappa_o, "kappa_o");
        positive(P_w, "P_w");
        positive(P_o, "P_o");
        positive(T, "T");
        if (!(G >= 0.0) || !std::isfinite(G)) throw PhysicsError("G must be non-negative and finite");
        if (!std::isfinite(delta_w) || !std::isfinite(delta_o))
            throw PhysicsError("detunings must be finite");
        if (!std::isfinite(g_w_bare) || !std::isfinite(g_o_bare))
            throw PhysicsError("bare couplings must be finite");
        if (!(theta >= 0.0) || !(theta < constants::two_pi))
            throw PhysicsError("theta must be stored reduced to [0, 2 pi)");
    }

    bool operator==(const PhysicalParams&) const = default;
};

/// Quantities derived from PhysicalParams.
struct DerivedParams {
    double E_w{};        ///< microwave drive strength (rad/s)
    double E_o{};        ///< optical drive strength (rad/s)
    Complex alpha_w{};   ///< steady-state microwave amplitude
    Complex alpha_o{};   ///< steady-state optical amplitude
    Complex g_w_eff{};   ///< alpha_w * g_w_bare (rad/s)
    Complex g_o_eff{};   ///< alpha_o * g_o_bare (rad/s)
    double n_w_T{};      ///< thermal occupation of the microwave input
    double n_o_T{};      ///< thermal occupation of the optical input
    double n_b_T{};      ///< thermal occupation of the mechanical bath

    bool operator==(const DerivedParams&) const = default;
};

/// Planck occupation [exp(hbar omega / k_B T) - 1]^-1.  Underflows to 0
/// for optical frequencies at cryogenic temperatures.
inline double planck_occupation(double omega, double temperature) {
    const double x = constants::hbar * omega / (constants::k_B * temperature);
    const double e = std::expm1(x);
    if (std::isinf(e)) return 0.0;
    return 1.0 / e;
}

/// Cavity drive strength sqrt(2 P kappa / (hbar omega_drive)).
inline double drive_strength(double power, double kappa, double omega_drive) {
    return std::sqrt(2.0 * power * kappa / (constants::hbar * omega_drive));
}

} // namespace qiopa
