#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "qiopa/constants.hpp"
#include "qiopa/errors.hpp"

namespace qiopa {

using Complex = std::complex<double>;

/// Dense square complex matrix with a small fixed capacity.  The physics
/// only ever needs 6x6 (drift) and 4x4 (covariance) systems, so keeping
/// the dimension capped keeps the solvers below simple and fully testable.
class ComplexMatrix {
public:
    static constexpr int kMaxDim = 8;

    explicit ComplexMatrix(int n) : n_(n) {
        if (n < 1 || n > kMaxDim)
            throw NumericError("ComplexMatrix dimension must be in [1, 8]");
    }

    int dim() const { return n_; }

    Complex& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * kMaxDim + j]; }
    Complex operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * kMaxDim + j]; }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                const Complex z = (*this)(i, j);
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
            }
        return true;
    }

    /// Max-magnitude entry; used for scale-relative tolerances.
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

private:
    int n_;
    std::array<Complex, kMaxDim * kMaxDim> a_{};
};

namespace detail {

/// Complex Givens rotation [[c, s], [-conj(s), c]] zeroing b against a.
inline void givens(Complex a, Complex b, double& c, Complex& s) {
    const double nb = std::abs(b);
    if (nb == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    const double na = std::abs(a);
    if (na == 0.0) {
        c = 0.0;
        s = std::conj(b) / nb;
        return;
    }
    const double d = std::hypot(na, nb);
    c = na / d;
    s = (a / na) * std::conj(b) / d;
}

/// Eigenvalues of the 2x2 block [[a, b], [c, d]].
inline std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
    const Complex half_tr = 0.5 * (a + d);
    const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    return {half_tr + disc, half_tr - disc};
}

} // namespace detail

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form followed by explicitly shifted QR iteration with
/// Wilkinson shifts.  Unordered.  Throws NumericError if the iteration
/// budget (100 n^2 QR sweeps) is exhausted.
inline std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
    const int n = m.dim();
    if (!m.all_finite()) throw NumericError("eigenvalues: non-finite matrix entry");

    std::array<std::array<Complex, ComplexMatrix::kMaxDim>, ComplexMatrix::kMaxDim> h{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h[i][j] = m(i, j);

    const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());
    const double eps = std::numeric_limits<double>::epsilon();

    // Hessenberg reduction.
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(h[i][k]);
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm <= eps * scale) {
            for (int i = k + 2; i < n; ++i) h[i][k] = 0.0;
            continue;
        }
        const Complex x0 = h[k + 1][k];
        const Complex alpha = (std::abs(x0) > 0.0) ? -(x0 / std::abs(x0)) * xnorm : Complex(-xnorm, 0.0);
        std::array<Complex, ComplexMatrix::kMaxDim> v{};
        v[k + 1] = x0 - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = h[i][k];
        double vnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 <= 0.0) continue;
        const double inv_vnorm = 1.0 / std::sqrt(vnorm2);
        for (int i = k + 1; i < n; ++i) v[i] *= inv_vnorm;

        for (int j = k; j < n; ++j) { // (I - 2 v v†) H
            Complex c = 0.0;
            for (int i = k + 1; i < n; ++i) c += std::conj(v[i]) * h[i][j];
            c *= 2.0;
            for (int i = k + 1; i < n; ++i) h[i][j] -= v[i] * c;
        }
        for (int i = 0; i < n; ++i) { // H (I - 2 v v†)
            Complex c = 0.0;
            for (int j = k + 1; j < n; ++j) c += h[i][j] * v[j];
            c *= 2.0;
            for (int j = k + 1; j < n; ++j) h[i][j] -= c * std::conj(v[j]);
        }
        for (int i = k + 2; i < n; ++i) h[i][k] = 0.0;
    }

    auto negligible = [&](int i) {
        double s = std::abs(h[i][i]) + std::abs(h[i + 1][i + 1]);
        if (s == 0.0) s = scale;
        return std::abs(h[i + 1][i]) <= eps * s;
    };

    std::vector<Complex> eig;
    eig.reserve(static_cast<std::size_t>(n));
    int hi = n - 1;
    long budget = 100L * n * n;
    int iters_at_hi = 0;

    while (hi >= 0) {
        int lo = hi;
        while (lo > 0) {
            if (negligible(lo - 1)) {
                h[lo][lo - 1] = 0.0;
                break;
            }
            --lo;
        }

        if (lo == hi) {
            eig.push_back(h[hi][hi]);
            --hi;
            iters_at_hi = 0;
            continue;
        }
        if (lo == hi - 1) {
            auto [l1, l2] = detail::eig2(h[lo][lo], h[lo][hi], h[hi][lo], h[hi][hi]);
            eig.push_back(l1);
            eig.push_back(l2);
            hi -= 2;
            iters_at_hi = 0;
            continue;
        }

        if (--budget < 0) throw NumericError("eigenvalues: QR iteration did not converge");

        Complex mu;
        if (++iters_at_hi % 16 == 0) {
            // Exceptional shift to break rare stagnation cycles.
            mu = h[hi][hi] + Complex(1.5 * std::abs(h[hi][hi - 1]), 0.0);
        } else {
            auto [l1, l2] = detail::eig2(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
            mu = (std::abs(l1 - h[hi][hi]) < std::abs(l2 - h[hi][hi])) ? l1 : l2;
        }

        for (int i = lo; i <= hi; ++i) h[i][i] -= mu;

        std::array<double, ComplexMatrix::kMaxDim> cs{};
        std::array<Complex, ComplexMatrix::kMaxDim> sn{};
        for (int i = lo; i < hi; ++i) { // R = G_{hi-1} ... G_lo (H - mu I)
            detail::givens(h[i][i], h[i + 1][i], cs[i], sn[i]);
            for (int j = i; j <= hi; ++j) {
                const Complex t1 = h[i][j];
                const Complex t2 = h[i + 1][j];
                h[i][j] = cs[i] * t1 + sn[i] * t2;
                h[i + 1][j] = -std::conj(sn[i]) * t1 + cs[i] * t2;
            }
        }
        for (int i = lo; i < hi; ++i) { // H = R G_lo† G_{lo+1}† ... + mu I
            const int rmax = std::min(i + 1, hi);
            for (int r = lo; r <= rmax; ++r) {
                const Complex t1 = h[r][i];
                const Complex t2 = h[r][i + 1];
                h[r][i] = cs[i] * t1 + std::conj(sn[i]) * t2;
                h[r][i + 1] = -sn[i] * t1 + cs[i] * t2;
            }
        }
        for (int i = lo; i <= hi; ++i) h[i][i] += mu;
    }
    return eig;
}

/// LU factorization with partial pivoting.
class LuDecomposition {
public:
    explicit LuDecomposition(ComplexMatrix a) : lu_(a), singular_(false), swaps_(0) {
        const int n = lu_.dim();
        for (int i = 0; i < n; ++i) perm_[i] = i;
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best == 0.0) {
                singular_ = true;
                continue;
            }
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
                ++swaps_;
            }
            for (int i = k + 1; i < n; ++i) {
                const Complex f = lu_(i, k) / lu_(k, k);
                lu_(i, k) = f;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    Complex determinant() const {
        Complex d = (swaps_ % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i < lu_.dim(); ++i) d *= lu_(i, i);
        return d;
    }

    std::vector<Complex> solve(std::span<const Complex> rhs) const {
        const int n = lu_.dim();
        if (singular_) throw NumericError("lu_solve: singular matrix");
        std::vector<Complex> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(perm_[i])];
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] /= lu_(i, i);
        }
        return x;
    }

private:
    ComplexMatrix lu_;
    std::array<int, ComplexMatrix::kMaxDim> perm_{};
    bool singular_;
    int swaps_;
};

inline std::vector<Complex> lu_solve(const ComplexMatrix& a, std::span<const Complex> rhs) {
    return LuDecomposition(a).solve(rhs);
}

inline Complex determinant(const ComplexMatrix& a) {
    LuDecomposition lu(a);
    return lu.singular() ? Complex(0.0) : lu.determinant();
}

/// Complementary error function.
inline double erfc(double x) { return std::erfc(x); }

/// log10(erfc(x)) that stays finite for arguments where erfc itself
/// underflows.  For x > 8 uses the asymptotic expansion
/// erfc(x) ~ e^{-x^2} / (x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - ...),
/// truncated at its smallest term.
inline double log10_erfc(double x) {
    if (!(x > 8.0)) return std::log10(std::erfc(x));
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    double prev_mag = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        const double mag = std::abs(term);
        if (mag >= prev_mag) break; // asymptotic series started diverging
        sum += term;
        if (mag < 1e-18 * std::abs(sum)) break;
        prev_mag = mag;
    }
    return (-x * x + std::log(sum / (x * std::sqrt(constants::pi)))) / std::numbers::ln10;
}

} // namespace qiopa
