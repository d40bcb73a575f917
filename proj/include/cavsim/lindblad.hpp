#pragma once

// Master equation of the damped cavity,
//   drho/dt = -(i/hbar)[H, rho] + D[c1]rho + D[c2]rho,
// with H = hbar w a^+a, c1 = sqrt(gamma') a, c2 = sqrt(kappa) a^+,
// integrated by classical fixed-step RK4 with conservation diagnostics.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavsim/density.hpp"
#include "cavsim/fock.hpp"
#include "cavsim/integrator.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

struct IntegrationDivergedError : std::runtime_error {
    IntegrationDivergedError(double t_bad_, const std::string& what_failed)
        : std::runtime_error("integration diverged at t = " + std::to_string(t_bad_) +
                             ": " + what_failed),
          t_bad(t_bad_) {}
    double t_bad;
};

struct NoSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LindbladModel {
    CavityParams params;
    std::size_t dim;
    Matrix hamiltonian;  // hbar w a^+ a
    Matrix c1;           // sqrt(gamma') a
    Matrix c2;           // sqrt(kappa) a^+
    Matrix c1dc1;        // cached c1^+ c1
    Matrix c2dc2;

    static LindbladModel cavity(const CavityParams& p, FockDim d) {
        LindbladModel m{p, d.n, Matrix(), Matrix(), Matrix(), Matrix(), Matrix()};
        m.hamiltonian = (p.hbar * p.omega) * number_operator(d);
        m.c1 = std::sqrt(p.gamma_prime) * annihilation(d);
        m.c2 = std::sqrt(p.kappa) * creation(d);
        m.c1dc1 = adjoint(m.c1) * m.c1;
        m.c2dc2 = adjoint(m.c2) * m.c2;
        return m;
    }
};

// D[c]rho = c rho c^+ - 1/2 (c^+c rho + rho c^+c); traceless, Hermiticity
// preserving.
inline Matrix dissipator(const Matrix& c, const Matrix& rho) {
    if (!c.square() || !rho.square() || c.rows() != rho.rows())
        throw DimensionError("dissipator: dimension mismatch");
    const Matrix cdc = adjoint(c) * c;
    return c * rho * adjoint(c) - 0.5 * (cdc * rho + rho * cdc);
}

namespace detail {

inline Matrix lindblad_rhs_cached(const LindbladModel& m, const Matrix& rho) {
    const cdouble minus_i_over_hbar{0.0, -1.0 / m.params.hbar};
    Matrix out = minus_i_over_hbar * (m.hamiltonian * rho - rho * m.hamiltonian);
    out += m.c1 * rho * adjoint(m.c1) - 0.5 * (m.c1dc1 * rho + rho * m.c1dc1);
    out += m.c2 * rho * adjoint(m.c2) - 0.5 * (m.c2dc2 * rho + rho * m.c2dc2);
    return out;
}

}  // namespace detail

inline Matrix rhs(const LindbladModel& m, const Matrix& rho) {
    if (!rho.square() || rho.rows() != m.dim)
        throw DimensionError("rhs: state dimension does not match the model");
    return detail::lindblad_rhs_cached(m, rho);
}

// Heisenberg-picture generator: dX/dt = +(i/hbar)[H,X] + sum c^+ X c - 1/2 {c^+c, X}.
inline Matrix adjoint_rhs(const LindbladModel& m, const Matrix& x) {
    if (!x.square() || x.rows() != m.dim)
        throw DimensionError("adjoint_rhs: operator dimension does not match the model");
    const cdouble i_over_hbar{0.0, 1.0 / m.params.hbar};
    Matrix out = i_over_hbar * (m.hamiltonian * x - x * m.hamiltonian);
    out += adjoint(m.c1) * x * m.c1 - 0.5 * (m.c1dc1 * x + x * m.c1dc1);
    out += adjoint(m.c2) * x * m.c2 - 0.5 * (m.c2dc2 * x + x * m.c2dc2);
    return out;
}

struct LindbladTrajectory {
    std::vector<double> times;
    std::vector<DensityOperator> states;
};

// Fixed-step RK4. Each recorded snapshot must satisfy the density-operator
// invariants (Hermitian to 1e-10, trace to 1e-8, min eigenvalue >= -1e-8);
// the first violation aborts with the offending time. Trace drift is left
// unrenormalized by default: it is itself a diagnostic. Pass
// renormalize_trace = true to divide each step by its trace instead.
inline LindbladTrajectory integrate(const LindbladModel& m, const DensityOperator& rho0,
                                    const IntegratorConfig& cfg,
                                    bool renormalize_trace = false) {
    if (rho0.dim() != m.dim)
        throw DimensionError("integrate: initial state dimension does not match the model");
    const DensityTolerances snapshot_tol{1e-10, 1e-8, -1e-8};

    LindbladTrajectory out;
    Matrix rho = rho0.matrix();
    const std::size_t n_steps = cfg.n_steps();
    out.times.reserve(n_steps / cfg.record_every + 2);

    auto record = [&](double t, const Matrix& state) {
        try {
            out.states.emplace_back(state, snapshot_tol);
        } catch (const StateValidationError& e) {
            throw IntegrationDivergedError(t, e.what());
        }
        out.times.push_back(t);
    };

    record(0.0, rho);
    const double dt = cfg.dt;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const Matrix k1 = detail::lindblad_rhs_cached(m, rho);
        const Matrix k2 = detail::lindblad_rhs_cached(m, rho + (0.5 * dt) * k1);
        const Matrix k3 = detail::lindblad_rhs_cached(m, rho + (0.5 * dt) * k2);
        const Matrix k4 = detail::lindblad_rhs_cached(m, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (renormalize_trace) rho *= cdouble{1.0, 0.0} / trace(rho);
        const std::size_t step = k + 1;
        if (step % cfg.record_every == 0 || step == n_steps)
            record(static_cast<double>(step) * dt, rho);
    }
    return out;
}

// kappa/(gamma' - kappa), the fixed point of d<n>/dt = -2g<n> + kappa.
inline double steady_photon_number(const CavityParams& p) {
    if (!(p.gamma_prime > p.kappa))
        throw NoSteadyStateError("steady_photon_number: requires gamma_prime > kappa");
    return p.kappa / (p.gamma_prime - p.kappa);
}

}  // namespace cavsim
