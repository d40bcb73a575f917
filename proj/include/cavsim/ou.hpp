#pragma once

// Classical side of the cavity: the complex Ornstein-Uhlenbeck process
//   d alpha = -(g + i w) alpha dt + sqrt(kappa) d eta,
// with <d eta* d eta> = dt and <d eta d eta> = 0, sampled either by
// Euler-Maruyama or by the exact Gaussian transition kernel, plus the
// closed-form moments and the moment ODEs of the associated Fokker-Planck
// generator.
//
// Reproducibility contract
// ------------------------
//   * Trajectory k draws from a private stream seeded by
//     splitmix64(master_seed + (k+1) * 0x9E3779B97F4A7C15).
//   * Each stream is a std::mt19937_64 (sequence fixed by the standard)
//     mapped to uniforms u = ((x >> 11) + 1) * 2^-53 in (0, 1], turned into
//     Gaussian pairs by the classic Box-Muller transform. This scheme is
//     fixed per release; changing it is a breaking change.
//   * Ensembles are bitwise reproducible from (seed, config, method, params)
//     for any thread count: trajectories own disjoint output slots and
//     statistics reduce sequentially in trajectory order.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cavsim/fock.hpp"
#include "cavsim/integrator.hpp"
#include "cavsim/linalg.hpp"
#include "cavsim/parallel.hpp"

namespace cavsim {

struct RngSeed {
    std::uint64_t master = 0;
};

namespace detail {

inline std::uint64_t splitmix64_mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    // u in (0, 1]
    double next_uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    // Independent standard normal pair via Box-Muller.
    std::pair<double, double> next_gaussian_pair() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::mt19937_64 engine_;
};

inline GaussianStream stream_for_trajectory(RngSeed seed, std::uint64_t index) {
    return GaussianStream(detail::splitmix64_mix(seed.master + (index + 1) * 0x9E3779B97F4A7C15ULL));
}

// Complex Wiener increment: Re and Im independent N(0, dt/2), so that
// <d eta* d eta> = dt and <d eta d eta> = 0.
inline cdouble wiener_increment(GaussianStream& stream, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt must be > 0");
    const auto [z0, z1] = stream.next_gaussian_pair();
    const double s = std::sqrt(dt / 2.0);
    return {s * z0, s * z1};
}

// One Euler-Maruyama step of the OU stochastic equation.
inline cdouble em_step(cdouble alpha, double dt, cdouble deta, const CavityParams& p) {
    if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be > 0");
    const cdouble drift{p.g(), p.omega};
    return alpha - drift * alpha * dt + std::sqrt(p.kappa) * deta;
}

// Mean of the OU solution: e^{-(g+iw)t} alpha0 (the stochastic integral is
// mean-zero).
inline cdouble analytic_mean(cdouble alpha0, double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("analytic_mean: t must be >= 0");
    return std::exp(cdouble{-p.g() * t, -p.omega * t}) * alpha0;
}

// Variance of the OU solution, (kappa/2g)(1 - e^{-2gt}): the value of the
// Ito isometry integral kappa e^{-2gt} int_0^t e^{2gt'} dt'. Note the
// closed-form asymptote is kappa/2g.
inline double analytic_variance(double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("analytic_variance: t must be >= 0");
    if (p.kappa == 0.0) return 0.0;
    const double g = p.g();
    return p.kappa / (2.0 * g) * (1.0 - std::exp(-2.0 * g * t));
}

// Draws the OU solution at time t in one shot: deterministic decay of
// alpha0 plus a circularly-symmetric Gaussian with the closed-form
// variance. Exact in distribution; no sub-stepping.
inline cdouble exact_sample(cdouble alpha0, double t, GaussianStream& stream,
                            const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("exact_sample: t must be >= 0");
    const cdouble mean = analytic_mean(alpha0, t, p);
    const double var = analytic_variance(t, p);
    const auto [z0, z1] = stream.next_gaussian_pair();
    const double s = std::sqrt(var / 2.0);
    return mean + cdouble{s * z0, s * z1};
}

struct Trajectory {
    std::vector<double> times;
    std::vector<cdouble> values;
    std::uint64_t master_seed = 0;
    std::uint64_t index = 0;
};

enum class SdeMethod { euler_maruyama, exact };

// Trajectories share one time grid; values are stored row-per-trajectory.
class Ensemble {
public:
    Ensemble(std::vector<double> times, std::size_t n_traj, CavityParams params,
             RngSeed seed, SdeMethod method)
        : times_(std::move(times)), n_traj_(n_traj), params_(params), seed_(seed),
          method_(method), values_(n_traj * times_.size()) {}

    const std::vector<double>& times() const { return times_; }
    std::size_t n_trajectories() const { return n_traj_; }
    std::size_t n_times() const { return times_.size(); }
    const CavityParams& params() const { return params_; }
    RngSeed seed() const { return seed_; }
    SdeMethod method() const { return method_; }

    cdouble value(std::size_t traj, std::size_t time_idx) const {
        return values_[traj * times_.size() + time_idx];
    }
    cdouble* row(std::size_t traj) { return values_.data() + traj * times_.size(); }

    Trajectory trajectory(std::size_t k) const {
        Trajectory t;
        t.times = times_;
        t.values.assign(values_.begin() + k * times_.size(),
                        values_.begin() + (k + 1) * times_.size());
        t.master_seed = seed_.master;
        t.index = k;
        return t;
    }

private:
    std::vector<double> times_;
    std::size_t n_traj_;
    CavityParams params_;
    RngSeed seed_;
    SdeMethod method_;
    std::vector<cdouble> values_;
};

// Recorded grid: t = 0, then every record_every-th step, then the final
// step. Euler-Maruyama walks every dt step; the exact method jumps between
// recorded times with the exact transition kernel (the OU process is
// Markov, so this has the same law on the grid).
inline Ensemble simulate_ensemble(cdouble alpha0, const IntegratorConfig& cfg,
                                  std::size_t n_traj, RngSeed seed,
                                  const CavityParams& params, SdeMethod method,
                                  std::size_t n_threads = 0) {
    if (n_traj < 1) throw std::invalid_argument("simulate_ensemble: n_traj must be >= 1");
    const std::size_t n_steps = cfg.n_steps();

    std::vector<double> times;
    std::vector<std::size_t> step_of_record;
    times.push_back(0.0);
    step_of_record.push_back(0);
    for (std::size_t s = 1; s <= n_steps; ++s) {
        if (s % cfg.record_every == 0 || s == n_steps) {
            times.push_back(static_cast<double>(s) * cfg.dt);
            step_of_record.push_back(s);
        }
    }

    Ensemble ens(std::move(times), n_traj, params, seed, method);
    if (n_threads == 0) n_threads = detail::thread_count_from_env();

    detail::parallel_for_deterministic(n_traj, n_threads, [&](std::size_t k) {
        GaussianStream stream = stream_for_trajectory(seed, k);
        cdouble* out = ens.row(k);
        out[0] = alpha0;
        if (method == SdeMethod::euler_maruyama) {
            cdouble alpha = alpha0;
            std::size_t rec = 1;
            for (std::size_t s = 1; s <= n_steps; ++s) {
                alpha = em_step(alpha, cfg.dt, wiener_increment(stream, cfg.dt), params);
                if (rec < step_of_record.size() && step_of_record[rec] == s)
                    out[rec++] = alpha;
            }
        } else {
            cdouble alpha = alpha0;
            for (std::size_t rec = 1; rec < step_of_record.size(); ++rec) {
                const double span =
                    static_cast<double>(step_of_record[rec] - step_of_record[rec - 1]) * cfg.dt;
                alpha = exact_sample(alpha, span, stream, params);
                out[rec] = alpha;
            }
        }
    });
    return ens;
}

struct MomentStats {
    double t;
    cdouble mean;
    double variance;        // 1/(N-1) estimator on |alpha - mean|^2
    double mean_std_error;  // sqrt(variance / N)
    double variance_std_error;
};

// Sequential reduction in trajectory order (documented summation order, part
// of the reproducibility contract). Two-pass: means first, then deviations.
inline std::vector<MomentStats> ensemble_stats(const Ensemble& ens) {
    const std::size_t n = ens.n_trajectories();
    if (n == 0) throw std::invalid_argument("ensemble_stats: empty ensemble");
    const std::size_t nt = ens.n_times();
    std::vector<MomentStats> out(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        cdouble mean{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) mean += ens.value(k, i);
        mean /= static_cast<double>(n);

        double var = 0.0, var_se = 0.0;
        if (n > 1) {
            double sum_x = 0.0, sum_x2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double x = std::norm(ens.value(k, i) - mean);
                sum_x += x;
                sum_x2 += x * x;
            }
            var = sum_x / static_cast<double>(n - 1);
            const double mean_x = sum_x / static_cast<double>(n);
            const double var_x =
                std::max(0.0, (sum_x2 - static_cast<double>(n) * mean_x * mean_x) /
                                  static_cast<double>(n - 1));
            var_se = static_cast<double>(n) / static_cast<double>(n - 1) *
                     std::sqrt(var_x / static_cast<double>(n));
        }
        out[i] = {ens.times()[i], mean, var, std::sqrt(var / static_cast<double>(n)), var_se};
    }
    return out;
}

// First and second moments of the P-function under the Fokker-Planck flow:
//   dm1/dt = -(g+iw) m1,   dm2/dt = -2g m2 + kappa.
struct MomentState {
    cdouble m1;  // <alpha>
    double m2;   // <|alpha|^2>
};

inline MomentState moment_ode_evolve(const MomentState& m0, double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("moment_ode_evolve: t must be >= 0");
    const double g = p.g();
    MomentState out;
    out.m1 = std::exp(cdouble{-g * t, -p.omega * t}) * m0.m1;
    const double decay = std::exp(-2.0 * g * t);
    const double steady = (p.kappa == 0.0) ? 0.0 : p.kappa / (2.0 * g);
    out.m2 = decay * m0.m2 + steady * (1.0 - decay);
    return out;
}

}  // namespace cavsim
