#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "qiopa/dynamics.hpp"
#include "qiopa/numerics.hpp"
#include "qiopa/params.hpp"

namespace qiopa {

/// Transfer coefficients of the output fields at a single Fourier
/// frequency (convention O(w) = (2 pi)^{-1/2} \int dt O(t) e^{i w t}):
///   d_w(w) = A1 a_w,in + A2 a_w,in† + A3 a_o,in + A4 a_o,in† + A5 b_in + A6 b_in†
///   d_o(w) = B1 a_w,in + B2 a_w,in† + B3 a_o,in + B4 a_o,in† + B5 b_in + B6 b_in†
struct OutputCoefficients {
    double omega{};
    std::array<Complex, 6> A{};
    std::array<Complex, 6> B{};
};

/// Closed-form evaluation of the twelve transfer coefficients.
/// Shares a single scalar denominator u(w) (the mechanical response
/// dressed by both cavities); each coefficient adds the direct cavity
/// reflection where applicable.
inline OutputCoefficients output_coefficients(const PhysicalParams& p, const DerivedParams& d,
                                              double omega) {
    const Complex i(0.0, 1.0);
    const double w = omega;
    const Complex gw = d.g_w_eff;
    const Complex go = d.g_o_eff;
    const double wm = p.omega_m;
    const double gm = p.gamma_m();

    const Complex dwm = i * (w - p.delta_w) - p.kappa_w; // Delta_w^-
    const Complex dwp = i * (w + p.delta_w) - p.kappa_w; // Delta_w^+
    const Complex dom = i * (w - p.delta_o) - p.kappa_o; // Delta_o^-
    const Complex dop = i * (w + p.delta_o) - p.kappa_o; // Delta_o^+
    const Complex dmm = i * (w - wm) - gm;               // Delta_m^-
    const Complex dmp = i * (w + wm) - gm;               // Delta_m^+
    const Complex Do = dom * dop - 4.0 * p.G * p.G;

    if (dwm == 0.0 || dwp == 0.0)
        throw PhysicsError("output_coefficients: microwave denominator Delta_w vanishes");
    if (Do == 0.0)
        throw PhysicsError("output_coefficients: optical denominator Delta_o^- Delta_o^+ - 4G^2 vanishes");

    const Complex ei = std::exp(i * p.theta);
    const Complex emi = std::conj(ei);
    const double g2w = std::norm(gw);
    const double g2o = std::norm(go);

    // Mechanical self-energy terms from each cavity.
    const Complex opt = 2.0 * p.G * (go * go * emi - std::conj(go) * std::conj(go) * ei)
                        - 2.0 * i * p.delta_o * g2o;
    const Complex u = -2.0 * i * wm * opt / Do - 4.0 * wm * p.delta_w * g2w / (dwm * dwp) + dmm * dmp;
    if (u == 0.0) throw PhysicsError("output_coefficients: shared denominator u vanishes");

    const double skwko = std::sqrt(p.kappa_w * p.kappa_o);
    const double skwgm = std::sqrt(p.kappa_w * gm);
    const double skogm = std::sqrt(p.kappa_o * gm);
    const Complex P = 2.0 * p.G * ei * std::conj(go) + dop * go;

    OutputCoefficients c;
    c.omega = omega;
    c.A[0] = (4.0 * i * wm * g2w * p.kappa_w / (dwm * dwm)) / u - 2.0 * p.kappa_w / dwm - 1.0;
    c.A[1] = (4.0 * i * wm * gw * gw * p.kappa_w / (dwm * dwp)) / u;
    c.A[2] = -(4.0 * i * wm * skwko * (2.0 * p.G * emi * go * gw - dop * std::conj(go) * gw) / (dwm * Do)) / u;
    c.A[3] = -(4.0 * i * wm * skwko * (2.0 * p.G * ei * std::conj(go) * gw - dom * go * gw) / (dwm * Do)) / u;
    c.A[4] = (2.0 * i * gw * skwgm * dmp / dwm) / u;
    c.A[5] = (2.0 * i * gw * skwgm * dmm / dwm) / u;
    c.B[0] = (4.0 * i * wm * skwko * (2.0 * p.G * ei * std::conj(go) * std::conj(gw) + dop * go * std::conj(gw)) / (dwm * Do)) / u;
    c.B[1] = (4.0 * i * wm * skwko * (2.0 * p.G * ei * std::conj(go) * gw + dop * go * gw) / (dwp * Do)) / u;
    c.B[2] = -(4.0 * i * wm * p.kappa_o * P * (2.0 * p.G * emi * go - dop * std::conj(go)) / (Do * Do)) / u
             - 2.0 * p.kappa_o * dop / Do - 1.0;
    c.B[3] = -(4.0 * i * wm * p.kappa_o * P * (2.0 * p.G * ei * std::conj(go) - dom * go) / (Do * Do)) / u
             + 4.0 * p.kappa_o * p.G * ei / Do;
    c.B[4] = (2.0 * i * skogm * dmp * P / Do) / u;
    c.B[5] = (2.0 * i * skogm * dmm * P / Do) / u;

    for (int k = 0; k < 6; ++k) {
        if (!std::isfinite(std::abs(c.A[k])) || !std::isfinite(std::abs(c.B[k])))
            throw PhysicsError("output_coefficients: non-finite coefficient (pole at omega = " +
                               std::to_string(omega) + ")");
    }
    return c;
}

/// Independent route to the same coefficients: solve the linearized
/// dynamics in the frequency domain by a direct 6x6 complex linear solve
/// f(w) = -(L + i w I)^{-1} zeta(w) and apply the input-output relation
/// d_j = sqrt(2 kappa_j) a_j - a_j,in.  Serves as the oracle for
/// output_coefficients.
inline OutputCoefficients transfer_matrix_numeric(const PhysicalParams& p, const DerivedParams& d,
                                                  double omega) {
    const DriftMatrix L = drift_matrix(p, d);
    ComplexMatrix m(6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = L.entries(i, j);
    const Complex iw(0.0, omega);
    for (int i = 0; i < 6; ++i) m(i, i) += iw;

    LuDecomposition lu(m);
    if (lu.singular())
        throw PhysicsError("transfer_matrix_numeric: (L + i omega I) singular at omega = " +
                           std::to_string(omega));

    const std::array<double, 6> noise_scale = {
        std::sqrt(2.0 * p.kappa_w), std::sqrt(2.0 * p.kappa_w),
        std::sqrt(2.0 * p.kappa_o), std::sqrt(2.0 * p.kappa_o),
        std::sqrt(2.0 * p.gamma_m()), std::sqrt(2.0 * p.gamma_m())};

    OutputCoefficients c;
    c.omega = omega;
    for (int k = 0; k < 6; ++k) {
        std::array<Complex, 6> e{};
        e[static_cast<std::size_t>(k)] = -noise_scale[static_cast<std::size_t>(k)];
        const auto col = lu.solve(e); // column k of -(L + i w I)^{-1}, noise-scaled
        c.A[k] = std::sqrt(2.0 * p.kappa_w) * col[0];
        c.B[k] = std::sqrt(2.0 * p.kappa_o) * col[2];
    }
    c.A[0] -= 1.0;
    c.B[2] -= 1.0;
    return c;
}

/// Stationary output photon numbers at the evaluation frequency.
struct PhotonNumbers {
    double n_o_given_w{}; ///< optical output photons fed by the microwave input
    double n_w_given_o{}; ///< microwave output photons fed by the optical input
    double n_w_out{};     ///< total microwave output photon number
};

inline PhotonNumbers photon_numbers(const OutputCoefficients& c, double n_w_T, double n_o_T,
                                    double n_b_T) {
    PhotonNumbers n;
    n.n_o_given_w = (std::norm(c.B[0]) + std::norm(c.B[1])) * n_w_T + std::norm(c.B[1]);
    n.n_w_given_o = (std::norm(c.A[2]) + std::norm(c.A[3])) * n_o_T + std::norm(c.A[3]);
    n.n_w_out = (std::norm(c.A[0]) + std::norm(c.A[1])) * n_w_T +
                (std::norm(c.A[2]) + std::norm(c.A[3])) * n_o_T +
                (std::norm(c.A[4]) + std::norm(c.A[5])) * n_b_T + std::norm(c.A[1]) +
                std::norm(c.A[3]) + std::norm(c.A[5]);
    return n;
}

} // namespace qiopa
