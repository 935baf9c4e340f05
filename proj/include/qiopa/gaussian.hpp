#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "qiopa/spectra.hpp"

namespace qiopa {

/// 4x4 real symmetric covariance matrix of the output quadratures
/// u = (X_w, Y_w, X_o, Y_o) at a single evaluation frequency, in the
/// convention where the vacuum covariance matrix is I/2.
struct CovarianceMatrix {
    double omega{};
    std::array<double, 16> entries{};

    double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * 4 + j]; }
    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * 4 + j]; }
};

namespace detail {

/// Quadrature expansion over the six input-operator slots.  Creation-type
/// content pairs the coefficients at +w with conjugated coefficients at -w.
inline std::array<std::array<Complex, 6>, 4> quadrature_rows(const OutputCoefficients& plus,
                                                             const OutputCoefficients& minus) {
    constexpr int swap_pair[6] = {1, 0, 3, 2, 5, 4};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex inv_isqrt2 = Complex(0.0, -1.0) * inv_sqrt2; // 1/(i sqrt 2)
    std::array<std::array<Complex, 6>, 4> w{};
    for (int k = 0; k < 6; ++k) {
        const Complex aw = plus.A[k];
        const Complex aw_dag = std::conj(minus.A[swap_pair[k]]);
        const Complex bo = plus.B[k];
        const Complex bo_dag = std::conj(minus.B[swap_pair[k]]);
        w[0][k] = (aw + aw_dag) * inv_sqrt2;
        w[1][k] = (aw - aw_dag) * inv_isqrt2;
        w[2][k] = (bo + bo_dag) * inv_sqrt2;
        w[3][k] = (bo - bo_dag) * inv_isqrt2;
    }
    return w;
}

} // namespace detail

/// Contract the quadrature expansions against the thermal input
/// correlators and strip the delta(w + w') factor.  The symmetrized
/// second moment is Hermitian; its real part is the covariance matrix
/// (the imaginary antisymmetric remainder is the frequency-asymmetric
/// commutator content, which does not belong to symmetric correlations).
inline CovarianceMatrix assemble_covariance(const OutputCoefficients& plus,
                                            const OutputCoefficients& minus, double n_w, double n_o,
                                            double n_b) {
    const auto wp = detail::quadrature_rows(plus, minus);
    const auto wn = detail::quadrature_rows(minus, plus);

    // Nonzero correlators: <a(w) a†(w')> = (n+1) d(w+w'), <a†(w) a(w')> = n d(w+w').
    const std::array<double, 6> n_plus_1 = {n_w + 1.0, 0.0, n_o + 1.0, 0.0, n_b + 1.0, 0.0};
    const std::array<double, 6> n_only = {0.0, n_w, 0.0, n_o, 0.0, n_b};

    CovarianceMatrix v;
    v.omega = plus.omega;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Complex sum = 0.0;
            for (int k = 0; k < 6; k += 2) {
                // (ann, cre) slot pair of one bath channel
                sum += wp[i][k] * wn[j][k + 1] * n_plus_1[k];
                sum += wp[i][k + 1] * wn[j][k] * n_only[k + 1];
            }
            Complex sum2 = 0.0;
            for (int k = 0; k < 6; k += 2) {
                sum2 += wn[j][k] * wp[i][k + 1] * n_plus_1[k];
                sum2 += wn[j][k + 1] * wp[i][k] * n_only[k + 1];
            }
            v.at(i, j) = 0.5 * (sum + sum2).real();
        }
    }
    return v;
}

/// Output covariance matrix at frequency omega.  Rejects unstable
/// operating points (stationary spectra do not exist there).
inline CovarianceMatrix covariance_matrix(const PhysicalParams& p, const DerivedParams& d,
                                          double omega) {
    const StabilityReport rep = stability(p, d);
    if (!rep.stable)
        throw PhysicsError("covariance_matrix: operating point is not stable");
    const OutputCoefficients plus = output_coefficients(p, d, omega);
    const OutputCoefficients minus = output_coefficients(p, d, -omega);
    return assemble_covariance(plus, minus, d.n_w_T, d.n_o_T, d.n_b_T);
}

namespace detail {

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

struct BlockDets {
    double detA, detB, detC, detV;
};

inline BlockDets block_determinants(const CovarianceMatrix& v) {
    BlockDets b;
    b.detA = det2(v(0, 0), v(0, 1), v(1, 0), v(1, 1));
    b.detB = det2(v(2, 2), v(2, 3), v(3, 2), v(3, 3));
    b.detC = det2(v(0, 2), v(0, 3), v(1, 2), v(1, 3));
    ComplexMatrix m(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = v(i, j);
    b.detV = determinant(m).real();
    return b;
}

inline double clipped_sqrt(double x) {
    if (x < 0.0) {
        if (x < -1e-12) throw NumericError("symplectic discriminant significantly negative");
        x = 0.0;
    }
    return std::sqrt(x);
}

} // namespace detail

/// Symplectic eigenvalues (nu_minus, nu_plus) of a two-mode covariance
/// matrix; physical states satisfy nu >= 1/2 in this convention.
inline std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& v) {
    const auto b = detail::block_determinants(v);
    const double sigma = b.detA + b.detB + 2.0 * b.detC;
    const double disc = detail::clipped_sqrt(sigma * sigma - 4.0 * b.detV);
    const double lo = detail::clipped_sqrt(0.5 * (sigma - disc));
    const double hi = detail::clipped_sqrt(0.5 * (sigma + disc));
    return {lo, hi};
}

struct EntanglementResult {
    double eta_minus{}; ///< lowest symplectic eigenvalue of the partial transpose
    double E_N{};       ///< logarithmic negativity max(0, -ln 2 eta_minus)
};

/// Logarithmic negativity from the 2x2 block decomposition
/// V = [[A, C], [C^T, B]]:  Sigma = det A + det B - 2 det C,
/// eta_minus = 2^{-1/2} sqrt(Sigma - sqrt(Sigma^2 - 4 det V)).
/// Reports unphysical covariance matrices instead of returning a value.
inline EntanglementResult log_negativity(const CovarianceMatrix& v) {
    const auto [nu_min, nu_max] = symplectic_eigenvalues(v);
    (void)nu_max;
    if (nu_min < 0.5 - 1e-9)
        throw PhysicsError("log_negativity: unphysical covariance matrix (nu_min = " +
                           std::to_string(nu_min) + ")");
    const auto b = detail::block_determinants(v);
    const double sigma = b.detA + b.detB - 2.0 * b.detC;
    const double disc = detail::clipped_sqrt(sigma * sigma - 4.0 * b.detV);
    EntanglementResult r;
    r.eta_minus = detail::clipped_sqrt(0.5 * (sigma - disc));
    r.E_N = std::max(0.0, -std::log(2.0 * r.eta_minus));
    return r;
}

} // namespace qiopa
