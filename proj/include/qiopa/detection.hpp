#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qiopa/gaussian.hpp"
#include "qiopa/spectra.hpp"

namespace qiopa {

/// Target-detection scenario: effective reflectivity eta (propagation
/// losses included), number of independent signal-idler mode pairs M,
/// and background thermal occupation n_B (identical under both
/// hypotheses in the small-eta, large-n_B regime).
struct ScenarioParams {
    double eta{};
    double M{};
    double n_B{};

    void validate() const {
        if (!(eta >= 0.0) || !(eta < 1.0)) throw PhysicsError("eta must lie in [0, 1)");
        if (!(M >= 1.0)) throw PhysicsError("M must be >= 1");
        if (!(n_B >= 0.0)) throw PhysicsError("n_B must be non-negative");
    }

    bool operator==(const ScenarioParams&) const = default;
};

/// Error-probability model.  AsPrinted evaluates erfc(SNR/8)/2; SqrtForm
/// evaluates erfc(sqrt(SNR/8))/2 for comparison with the antecedent
/// square-root convention.
enum class ErrorModel { AsPrinted, SqrtForm };

/// Per-hypothesis receiver statistics of one signal-idler mode pair, plus
/// the intermediate bath-decomposition tables used to assemble them.
struct DetectionStats {
    double N_plus_H0{}, N_minus_H0{};
    double N_plus_H1{}, N_minus_H1{};
    double n_eta_o_H0{}, n_eta_o_H1{}; ///< <d_eta,o† d_eta,o>
    double n_o_out{};                  ///< <d_o† d_o> of the retained idler
    double var_H0{}, var_H1{};
    double snr{};
    double p_err{};
    double log10_p_err{};
    double snr_coh{};
    double p_coh{};
    double log10_p_coh{};
    // Bath decompositions under H1: D/F per beam-splitter sign, K/T for
    // the reflected arm.
    std::array<double, 4> D_plus{}, F_plus{}, D_minus{}, F_minus{};
    std::array<double, 4> K{}, T{};
};

namespace detail {

/// Signal-path coefficient of the receiver output on transmitter input
/// slot k (divided by sqrt(eta)): B1(w) A_k(w) + B2(w) conj(A_sk(-w)),
/// where sk is the paired slot of k.
inline std::array<Complex, 6> signal_path(const OutputCoefficients& plus,
                                          const OutputCoefficients& minus) {
    constexpr int swap_pair[6] = {1, 0, 3, 2, 5, 4};
    std::array<Complex, 6> sp{};
    for (int k = 0; k < 6; ++k)
        sp[k] = plus.B[0] * plus.A[k] + plus.B[1] * std::conj(minus.A[swap_pair[k]]);
    return sp;
}

struct CountTables {
    std::array<double, 4> D{}, F{};
    double count{}; ///< <N_eta,sign> for the given hypothesis
};

inline CountTables count_tables(const OutputCoefficients& plus, const std::array<Complex, 6>& sp,
                                double sign, double eta, double n_w, double n_o, double n_b,
                                double n_B) {
    const double se = std::sqrt(eta);
    std::array<double, 6> z2{}; // |sqrt(eta) sp_k ± B_k|^2
    for (int k = 0; k < 6; ++k) z2[k] = std::norm(se * sp[k] + sign * plus.B[k]);

    CountTables t;
    t.D[0] = z2[1] + z2[0];
    t.D[1] = z2[3] + z2[2] + std::norm(plus.B[3]) + std::norm(plus.B[2]);
    t.D[2] = z2[5] + z2[4] + std::norm(plus.B[5]) + std::norm(plus.B[4]);
    t.D[3] = (1.0 - eta) * (std::norm(plus.B[1]) + std::norm(plus.B[0]));
    t.F[0] = z2[1];
    t.F[1] = z2[3] + std::norm(plus.B[3]);
    t.F[2] = z2[5] + std::norm(plus.B[5]);
    t.F[3] = (1.0 - eta) * std::norm(plus.B[1]);
    t.count = 0.5 * (t.D[0] * n_w + t.D[1] * n_o + t.D[2] * n_b + t.D[3] * n_B + t.F[0] + t.F[1] +
                     t.F[2] + t.F[3]);
    return t;
}

struct ReflectedTables {
    std::array<double, 4> K{}, T{};
    double n_eta_o{}; ///< <d_eta,o† d_eta,o> for the given hypothesis
};

inline ReflectedTables reflected_tables(const OutputCoefficients& plus,
                                        const std::array<Complex, 6>& sp, double eta, double n_w,
                                        double n_o, double n_b, double n_B) {
    ReflectedTables t;
    t.K[0] = eta * (std::norm(sp[1]) + std::norm(sp[0]));
    t.K[1] = eta * (std::norm(sp[3]) + std::norm(sp[2])) + std::norm(plus.B[3]) + std::norm(plus.B[2]);
    t.K[2] = eta * (std::norm(sp[5]) + std::norm(sp[4])) + std::norm(plus.B[5]) + std::norm(plus.B[4]);
    t.K[3] = (1.0 - eta) * (std::norm(plus.B[1]) + std::norm(plus.B[0]));
    t.T[0] = eta * std::norm(sp[1]);
    t.T[1] = eta * std::norm(sp[3]) + std::norm(plus.B[3]);
    t.T[2] = eta * std::norm(sp[5]) + std::norm(plus.B[5]);
    t.T[3] = (1.0 - eta) * std::norm(plus.B[1]);
    t.n_eta_o = t.K[0] * n_w + t.K[1] * n_o + t.K[2] * n_b + t.K[3] * n_B + t.T[0] + t.T[1] +
                t.T[2] + t.T[3];
    return t;
}

inline double error_probability(double snr, ErrorModel model) {
    const double arg = (model == ErrorModel::AsPrinted) ? snr / 8.0 : std::sqrt(snr / 8.0);
    return 0.5 * qiopa::erfc(arg);
}

inline double log10_error_probability(double snr, ErrorModel model) {
    const double arg = (model == ErrorModel::AsPrinted) ? snr / 8.0 : std::sqrt(snr / 8.0);
    return qiopa::log10_erfc(arg) - std::log10(2.0);
}

} // namespace detail

/// Mean photon counts at the two difference detectors under both
/// hypotheses (single mode pair).  The target-absent hypothesis is the
/// eta -> 0 substitution of the target-present expressions.
struct DetectorCounts {
    double N_plus_H0{}, N_minus_H0{};
    double N_plus_H1{}, N_minus_H1{};
};

inline DetectorCounts detector_counts(const PhysicalParams& p, const DerivedParams& d, double omega,
                                      const ScenarioParams& s) {
    s.validate();
    const OutputCoefficients plus = output_coefficients(p, d, omega);
    const OutputCoefficients minus = output_coefficients(p, d, -omega);
    const auto sp = detail::signal_path(plus, minus);
    DetectorCounts c;
    c.N_plus_H1 = detail::count_tables(plus, sp, +1.0, s.eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
    c.N_minus_H1 = detail::count_tables(plus, sp, -1.0, s.eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
    c.N_plus_H0 = detail::count_tables(plus, sp, +1.0, 0.0, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
    c.N_minus_H0 = detail::count_tables(plus, sp, -1.0, 0.0, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
    return c;
}

/// Variance of the detector-count difference per hypothesis:
/// <N+>(<N+>+1) + <N->(<N->+1) - (<d_eta,o† d_eta,o> - <d_o† d_o>)^2 / 2.
inline std::pair<double, double> count_variance(const PhysicalParams& p, const DerivedParams& d,
                                                double omega, const ScenarioParams& s) {
    s.validate();
    const OutputCoefficients plus = output_coefficients(p, d, omega);
    const OutputCoefficients minus = output_coefficients(p, d, -omega);
    const auto sp = detail::signal_path(plus, minus);
    const double n_o_out = (std::norm(plus.B[0]) + std::norm(plus.B[1])) * d.n_w_T +
                           (std::norm(plus.B[2]) + std::norm(plus.B[3])) * d.n_o_T +
                           (std::norm(plus.B[4]) + std::norm(plus.B[5])) * d.n_b_T +
                           std::norm(plus.B[1]) + std::norm(plus.B[3]) + std::norm(plus.B[5]);
    std::pair<double, double> out{};
    for (const bool h1 : {false, true}) {
        const double eta = h1 ? s.eta : 0.0;
        const double np =
            detail::count_tables(plus, sp, +1.0, eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
        const double nm =
            detail::count_tables(plus, sp, -1.0, eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).count;
        const double n_eta =
            detail::reflected_tables(plus, sp, eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B).n_eta_o;
        const double diff = n_eta - n_o_out;
        const double var = np * (np + 1.0) + nm * (nm + 1.0) - 0.5 * diff * diff;
        if (var < 0.0) throw NumericError("count_variance: negative variance");
        (h1 ? out.second : out.first) = var;
    }
    return out;
}

/// Full single-point detection pipeline (counts, variances, SNR, error
/// probability, coherent-radar benchmark of equal transmitted energy).
inline DetectionStats detect(const PhysicalParams& p, const DerivedParams& d, double omega,
                             const ScenarioParams& s, ErrorModel model = ErrorModel::AsPrinted) {
    s.validate();
    const OutputCoefficients plus = output_coefficients(p, d, omega);
    const OutputCoefficients minus = output_coefficients(p, d, -omega);
    const auto sp = detail::signal_path(plus, minus);

    DetectionStats r;
    const auto tp1 = detail::count_tables(plus, sp, +1.0, s.eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    const auto tm1 = detail::count_tables(plus, sp, -1.0, s.eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    const auto tp0 = detail::count_tables(plus, sp, +1.0, 0.0, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    const auto tm0 = detail::count_tables(plus, sp, -1.0, 0.0, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    r.N_plus_H1 = tp1.count;
    r.N_minus_H1 = tm1.count;
    r.N_plus_H0 = tp0.count;
    r.N_minus_H0 = tm0.count;
    r.D_plus = tp1.D;
    r.F_plus = tp1.F;
    r.D_minus = tm1.D;
    r.F_minus = tm1.F;

    r.n_o_out = (std::norm(plus.B[0]) + std::norm(plus.B[1])) * d.n_w_T +
                (std::norm(plus.B[2]) + std::norm(plus.B[3])) * d.n_o_T +
                (std::norm(plus.B[4]) + std::norm(plus.B[5])) * d.n_b_T + std::norm(plus.B[1]) +
                std::norm(plus.B[3]) + std::norm(plus.B[5]);
    const auto rf1 = detail::reflected_tables(plus, sp, s.eta, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    const auto rf0 = detail::reflected_tables(plus, sp, 0.0, d.n_w_T, d.n_o_T, d.n_b_T, s.n_B);
    r.K = rf1.K;
    r.T = rf1.T;
    r.n_eta_o_H1 = rf1.n_eta_o;
    r.n_eta_o_H0 = rf0.n_eta_o;

    auto variance = [&](double np, double nm, double n_eta) {
        const double diff = n_eta - r.n_o_out;
        const double v = np * (np + 1.0) + nm * (nm + 1.0) - 0.5 * diff * diff;
        if (v < 0.0) throw NumericError("detect: negative count variance");
        return v;
    };
    r.var_H1 = variance(r.N_plus_H1, r.N_minus_H1, r.n_eta_o_H1);
    r.var_H0 = variance(r.N_plus_H0, r.N_minus_H0, r.n_eta_o_H0);

    const double numerator =
        (r.N_plus_H1 - r.N_minus_H1) - (r.N_plus_H0 - r.N_minus_H0);
    const double denom = std::sqrt(r.var_H0) + std::sqrt(r.var_H1);
    if (denom == 0.0) {
        if (numerator != 0.0)
            throw PhysicsError("detect: degenerate receiver (zero variance, nonzero signal)");
        r.snr = 0.0;
    } else {
        r.snr = 4.0 * s.M * numerator * numerator / (denom * denom);
    }
    r.p_err = detail::error_probability(r.snr, model);
    r.log10_p_err = detail::log10_error_probability(r.snr, model);

    const PhotonNumbers pn = photon_numbers(plus, d.n_w_T, d.n_o_T, d.n_b_T);
    r.snr_coh = 4.0 * s.eta * s.M * pn.n_w_out / (2.0 * s.n_B + 1.0);
    r.p_coh = detail::error_probability(r.snr_coh, model);
    r.log10_p_coh = detail::log10_error_probability(r.snr_coh, model);
    return r;
}

/// SNR of the M-pair difference measurement and the resulting error
/// probability.
inline std::pair<double, double> snr_and_error(const PhysicalParams& p, const DerivedParams& d,
                                               double omega, const ScenarioParams& s,
                                               ErrorModel model = ErrorModel::AsPrinted) {
    const DetectionStats r = detect(p, d, omega, s, model);
    return {r.snr, r.p_err};
}

/// Conventional coherent-state radar of equal transmitted photon number:
/// SNR_coh = 4 eta M n_w / (2 n_B + 1).
inline std::pair<double, double> coherent_benchmark(const PhysicalParams& p,
                                                    const DerivedParams& d, double omega,
                                                    const ScenarioParams& s,
                                                    ErrorModel model = ErrorModel::AsPrinted) {
    s.validate();
    const OutputCoefficients plus = output_coefficients(p, d, omega);
    const PhotonNumbers pn = photon_numbers(plus, d.n_w_T, d.n_o_T, d.n_b_T);
    const double snr = 4.0 * s.eta * s.M * pn.n_w_out / (2.0 * s.n_B + 1.0);
    return {snr, detail::error_probability(snr, model)};
}

} // namespace qiopa
