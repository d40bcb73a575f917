#pragma once

// Heisenberg-picture field and quadrature dynamics at the level of first and
// second moments. The operator-valued noise integrals are represented only
// through their moments (they are defined weakly); the closed-form variances
// carry an independent Monte Carlo oracle built from classical Gaussians.
//
// Conventions: the quadrature noises d eta_1, d eta_2 entering
// d eta = (d eta_1 + i d eta_2)/2 have <d eta_i^2> = 2 dt, forced by
// <d eta* d eta> = dt with <d eta d eta> = 0. The quadrature displays are
// read with the sqrt(hbar/2mw) normalization applied once, outside the
// bracketed combination.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cavsim/fock.hpp"
#include "cavsim/ou.hpp"
#include "cavsim/parallel.hpp"

namespace cavsim {

struct QuadratureMoments {
    double q_mean;
    double p_mean;
    double q_var;
    double p_var;
    double t;
};

// Deterministic part of Q(t), P(t): damped harmonic rotation.
inline std::pair<double, double> quadrature_mean(double t, double q0, double p0,
                                                 const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("quadrature_mean: t must be >= 0");
    const double decay = std::exp(-p.g() * t);
    const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);
    const double mw = p.mass * p.omega;
    return {decay * (q0 * c + p0 / mw * s), decay * (p0 * c - mw * q0 * s)};
}

// Noise-integral variances of both quadratures: (kappa/g)(1 - e^{-2gt}),
// twice the OU amplitude variance (the factor comes from the 1/2
// decomposition of d eta).
inline std::pair<double, double> quadrature_noise_variance(double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("quadrature_noise_variance: t must be >= 0");
    if (p.kappa == 0.0) return {0.0, 0.0};
    const double g = p.g();
    const double v = p.kappa / g * (1.0 - std::exp(-2.0 * g * t));
    return {v, v};
}

// Mean of the Heisenberg-picture mode operator. Deliberately built from real
// exponentials and trigonometry, with no code shared with ou::analytic_mean,
// so the two serve as independent cross-checks of the same law.
inline cdouble field_mean(double t, cdouble a0_mean, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("field_mean: t must be >= 0");
    const double decay = std::exp(-p.g() * t);
    const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);
    return cdouble{decay * c, -decay * s} * a0_mean;
}

struct NoiseVarianceEstimate {
    double q_var;
    double p_var;
    double q_std_error;
    double p_std_error;
};

// Monte Carlo oracle for quadrature_noise_variance: simulates the
// discretized noise integrals
//   e^{-gt} sqrt(kappa) sum_k e^{g t_k} [cos w(t-t_k) x1_k + sin w(t-t_k) x2_k]
// (and the P-quadrature analog) with independent classical Gaussians
// x_i ~ N(0, 2 dt) on the left-endpoint (Ito) grid. Bias is O(g dt)
// relative; keep dt well below the 3-sigma band being tested.
inline NoiseVarianceEstimate monte_carlo_noise_variance(double t, const CavityParams& p,
                                                        std::size_t n_paths, double dt,
                                                        RngSeed seed,
                                                        std::size_t n_threads = 0) {
    if (!(t >= 0.0)) throw std::invalid_argument("monte_carlo_noise_variance: t must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("monte_carlo_noise_variance: dt must be > 0");
    if (n_paths < 2) throw std::invalid_argument("monte_carlo_noise_variance: need n_paths >= 2");
    const std::size_t n_steps = static_cast<std::size_t>(t / dt + 0.5);
    const double g = p.g(), w = p.omega;
    const double root_k = std::sqrt(p.kappa);
    const double sd = std::sqrt(2.0 * dt);

    std::vector<double> q(n_paths), pq(n_paths);
    if (n_threads == 0) n_threads = detail::thread_count_from_env();
    detail::parallel_for_deterministic(n_paths, n_threads, [&](std::size_t path) {
        GaussianStream stream = stream_for_trajectory(seed, path);
        double q_acc = 0.0, p_acc = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double tk = static_cast<double>(k) * dt;
            const auto [z1, z2] = stream.next_gaussian_pair();
            const double x1 = sd * z1, x2 = sd * z2;
            const double c = std::cos(w * (t - tk)), s = std::sin(w * (t - tk));
            const double gain = std::exp(g * tk);
            q_acc += gain * (c * x1 + s * x2);
            p_acc += gain * (x2 * c - x1 * s);
        }
        const double pref = std::exp(-g * t) * root_k;
        q[path] = pref * q_acc;
        pq[path] = pref * p_acc;
    });

    auto sample_var = [n_paths](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(n_paths);
        double sum_d2 = 0.0, sum_d4 = 0.0;
        for (double x : xs) {
            const double d2 = (x - mean) * (x - mean);
            sum_d2 += d2;
            sum_d4 += d2 * d2;
        }
        const double var = sum_d2 / static_cast<double>(n_paths - 1);
        const double mean_d2 = sum_d2 / static_cast<double>(n_paths);
        const double var_d2 = std::max(
            0.0, (sum_d4 - static_cast<double>(n_paths) * mean_d2 * mean_d2) /
                     static_cast<double>(n_paths - 1));
        const double se = std::sqrt(var_d2 / static_cast<double>(n_paths));
        return std::pair<double, double>{var, se};
    };

    const auto [qv, qse] = sample_var(q);
    const auto [pv, pse] = sample_var(pq);
    return {qv, pv, qse, pse};
}

}  // namespace cavsim
