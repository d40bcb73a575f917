#pragma once

// Validated density operators: Hermitian, unit trace, positive up to a
// floating-point floor.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "cavsim/linalg.hpp"

namespace cavsim {

struct StateValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DensityTolerances {
    double hermiticity = 1e-10;  // Frobenius norm of rho - rho^H
    double trace = 1e-10;        // |tr(rho) - 1|
    double min_eigenvalue = -1e-8;
};

class DensityOperator {
public:
    explicit DensityOperator(Matrix rho, DensityTolerances tol = {})
        : rho_(std::move(rho)) {
        validate(rho_, tol);
    }

    const Matrix& matrix() const { return rho_; }
    std::size_t dim() const { return rho_.rows(); }

    static DensityOperator pure(const Vector& psi) {
        const std::size_t n = psi.size();
        Matrix rho(n, n);
        double norm2 = 0.0;
        for (const auto& c : psi) norm2 += std::norm(c);
        if (norm2 <= 0.0) throw StateValidationError("pure state: zero vector");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rho(i, j) = psi[i] * std::conj(psi[j]) / norm2;
        return DensityOperator(std::move(rho));
    }

    static DensityOperator maximally_mixed(std::size_t n) {
        Matrix rho(n, n);
        for (std::size_t i = 0; i < n; ++i) rho(i, i) = 1.0 / static_cast<double>(n);
        return DensityOperator(std::move(rho));
    }

    // Truncated geometric (thermal-like) diagonal state with mean occupation
    // nbar; renormalized over the truncated basis.
    static DensityOperator thermal_geometric(double nbar, std::size_t n) {
        if (nbar < 0.0) throw StateValidationError("thermal_geometric: nbar < 0");
        Matrix rho(n, n);
        const double r = nbar / (1.0 + nbar);
        double w = 1.0, total = 0.0;
        for (std::size_t k = 0; k < n; ++k, w *= r) {
            rho(k, k) = w;
            total += w;
        }
        for (std::size_t k = 0; k < n; ++k) rho(k, k) /= total;
        return DensityOperator(std::move(rho));
    }

    static void validate(const Matrix& rho, DensityTolerances tol = {}) {
        if (!rho.square()) throw StateValidationError("density operator must be square");
        const double herm = frobenius_norm(rho - adjoint(rho));
        if (herm > tol.hermiticity)
            throw StateValidationError("density operator not Hermitian: defect " + std::to_string(herm));
        const double tr_err = std::abs(trace(rho) - cdouble{1.0, 0.0});
        if (tr_err > tol.trace)
            throw StateValidationError("density operator trace off by " + std::to_string(tr_err));
        const double lmin = min_hermitian_eigenvalue(rho);
        if (lmin < tol.min_eigenvalue)
            throw StateValidationError("density operator not positive: min eigenvalue " + std::to_string(lmin));
    }

private:
    Matrix rho_;
};

}  // namespace cavsim
