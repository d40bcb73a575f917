#pragma once

// Truncated Fock-space basics: ladder operators, coherent states,
// expectations, and the cavity parameter set shared by every module.

#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <stdexcept>

#include "cavsim/density.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

// Truncation dimension; basis |0> ... |n-1>.
struct FockDim {
    explicit FockDim(std::size_t n_) : n(n_) {
        if (n < 2) throw DimensionError("FockDim requires n >= 2");
    }
    std::size_t n;
};

// Physical constants of the damped cavity. Rates share the inverse-time unit
// of omega; hbar and mass default to 1 so the reference scenarios are
// dimensionless. Ordinary states of the cavity require gamma_prime > kappa
// so the damping g = (gamma_prime - kappa)/2 is positive; the closed-system
// diagnostic flag admits the lossless case gamma_prime = kappa = 0 used by
// unitary-limit regression checks.
struct CavityParams {
    double omega;
    double gamma_prime;
    double kappa;
    double hbar = 1.0;
    double mass = 1.0;
    bool closed_system_diagnostic = false;

    CavityParams(double omega_, double gamma_prime_, double kappa_,
                 double hbar_ = 1.0, double mass_ = 1.0,
                 bool closed_system_diagnostic_ = false)
        : omega(omega_), gamma_prime(gamma_prime_), kappa(kappa_),
          hbar(hbar_), mass(mass_),
          closed_system_diagnostic(closed_system_diagnostic_) {
        if (!(omega > 0.0)) throw std::invalid_argument("CavityParams: omega must be > 0");
        if (!(hbar > 0.0) || !(mass > 0.0))
            throw std::invalid_argument("CavityParams: hbar and mass must be > 0");
        if (closed_system_diagnostic) {
            if (gamma_prime != 0.0 || kappa != 0.0)
                throw std::invalid_argument(
                    "CavityParams: closed-system diagnostic mode requires gamma_prime = kappa = 0");
        } else {
            if (!(kappa >= 0.0) || !(gamma_prime > kappa))
                throw std::invalid_argument("CavityParams: need gamma_prime > kappa >= 0");
        }
    }

    double g() const { return 0.5 * (gamma_prime - kappa); }
};

inline CavityParams reference_params() { return CavityParams(1.0, 0.5, 0.1); }

// a|n> = sqrt(n)|n-1>
inline Matrix annihilation(FockDim dim) {
    Matrix m(dim.n, dim.n);
    for (std::size_t n = 1; n < dim.n; ++n)
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

inline Matrix creation(FockDim dim) { return adjoint(annihilation(dim)); }

inline Matrix number_operator(FockDim dim) {
    Matrix m(dim.n, dim.n);
    for (std::size_t n = 0; n < dim.n; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

// Coherent-state amplitudes c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!),
// renormalized after truncation. Warns (does not fail) when the truncation
// guard |alpha|^2 > dim/4 is violated or when the truncated tail is visible.
inline Vector coherent_state(cdouble alpha, FockDim dim) {
    const double a2 = std::norm(alpha);
    if (a2 > static_cast<double>(dim.n) / 4.0)
        std::cerr << "cavsim: coherent_state diagnostic: |alpha|^2 = " << a2
                  << " exceeds dim/4 = " << dim.n / 4.0
                  << "; truncation error may be significant\n";
    Vector c(dim.n);
    cdouble amp = std::exp(cdouble{-a2 / 2.0, 0.0});
    for (std::size_t n = 0; n < dim.n; ++n) {
        c[n] = amp;
        amp *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    const double pre_norm = vec_norm(c);
    if (pre_norm < 0.999)
        std::cerr << "cavsim: coherent_state diagnostic: pre-renormalization norm "
                  << pre_norm << " < 0.999\n";
    for (auto& x : c) x /= pre_norm;
    return c;
}

// tr(rho * op)
inline cdouble expectation(const Matrix& op, const DensityOperator& rho) {
    if (op.rows() != rho.dim() || op.cols() != rho.dim())
        throw DimensionError("expectation: operator/state dimension mismatch");
    cdouble t{0.0, 0.0};
    const Matrix& r = rho.matrix();
    for (std::size_t i = 0; i < op.rows(); ++i)
        for (std::size_t k = 0; k < op.rows(); ++k)
            t += r(i, k) * op(k, i);
    return t;
}

}  // namespace cavsim
