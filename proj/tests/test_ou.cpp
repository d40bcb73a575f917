#include <doctest.h>

#include <cmath>
#include <vector>

#include "cavsim/ou.hpp"

using namespace cavsim;

namespace {

// Composite Simpson quadrature of kappa e^{-2gt} int_0^t e^{2gt'} dt',
// the independent oracle for analytic_variance.
double variance_by_quadrature(double t, const CavityParams& p, std::size_t n_intervals = 20000) {
    if (t == 0.0) return 0.0;
    const double g = p.g();
    const double h = t / static_cast<double>(n_intervals);
    auto f = [&](double x) { return std::exp(2.0 * g * x); };
    double s = f(0.0) + f(t);
    for (std::size_t k = 1; k < n_intervals; ++k)
        s += f(static_cast<double>(k) * h) * ((k % 2) ? 4.0 : 2.0);
    return p.kappa * std::exp(-2.0 * g * t) * s * h / 3.0;
}

}  // namespace

TEST_CASE("wiener increment moments, Monte Carlo") {
    GaussianStream stream(991u);
    const double dt = 0.01;
    const std::size_t n = 1000000;
    cdouble sum{0.0, 0.0}, sum_sq{0.0, 0.0};
    double sum_abs2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cdouble d = wiener_increment(stream, dt);
        sum += d;
        sum_sq += d * d;
        sum_abs2 += std::norm(d);
    }
    const auto nn = static_cast<double>(n);
    // 4-sigma bounds on the mean estimators
    CHECK(std::abs(sum / nn) < 4.0 * std::sqrt(dt / nn));
    CHECK(std::abs(sum_abs2 / nn - dt) < 0.01 * dt);
    CHECK(std::abs(sum_sq / nn) < 4.0 * std::sqrt(2.0) * dt / std::sqrt(nn));
    CHECK_THROWS_AS(wiener_increment(stream, 0.0), std::invalid_argument);
}

TEST_CASE("em_step arithmetic") {
    const CavityParams p = reference_params();
    // noise coefficient vanishes at kappa = 0
    const CavityParams lossless(1.0, 0.5, 0.0);
    const cdouble stepped = em_step(cdouble{1.0, 0.0}, 0.01, cdouble{0.3, 0.7}, lossless);
    const cdouble expected_det = cdouble{1.0, 0.0} * (cdouble{1.0, 0.0} - cdouble{0.25, 1.0} * 0.01);
    CHECK(std::abs(stepped - expected_det) < 1e-16);

    CHECK(em_step(cdouble{0.0, 0.0}, 0.5, cdouble{0.0, 0.0}, p) == cdouble{0.0, 0.0});

    const cdouble ref = em_step(cdouble{1.0, 0.0}, 0.01, cdouble{0.0, 0.0}, p);
    CHECK(std::abs(ref - cdouble{0.998, -0.01}) < 1e-15);
    CHECK_THROWS_AS(em_step(cdouble{1.0, 0.0}, -1.0, cdouble{0.0, 0.0}, p), std::invalid_argument);
}

TEST_CASE("analytic mean: frozen values") {
    const CavityParams p = reference_params();
    CHECK(analytic_mean(cdouble{0.3, -0.2}, 0.0, p) == cdouble{0.3, -0.2});
    CHECK(std::abs(analytic_mean(cdouble{0.0, 0.0}, 7.0, p)) == 0.0);
    // e^{-1} e^{-5i} = e^{-1}(cos 5 - i sin 5), sin 5 < 0
    const cdouble got = analytic_mean(cdouble{1.0, 0.0}, 5.0, p);
    const cdouble expected{std::exp(-1.0) * std::cos(5.0), -std::exp(-1.0) * std::sin(5.0)};
    CHECK(std::abs(got - expected) < 1e-15);
    CHECK(got.real() == doctest::Approx(0.104353).epsilon(1e-5));
    CHECK(got.imag() == doctest::Approx(0.352770).epsilon(1e-5));
}

TEST_CASE("analytic variance vs quadrature oracle") {
    const CavityParams p = reference_params();
    CHECK(analytic_variance(0.0, p) == 0.0);
    for (double t : {0.3, 1.0, 2.0, 5.0, 20.0})
        CHECK(std::abs(analytic_variance(t, p) - variance_by_quadrature(t, p)) < 1e-10);
    // closed-form spot value at t = 2
    CHECK(analytic_variance(2.0, p) == doctest::Approx(0.25 * (1.0 - std::exp(-0.8))).epsilon(1e-14));
    // long-time asymptote kappa/2g
    CHECK(analytic_variance(100.0, p) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("analytic variance is nondecreasing and bounded by kappa/2g") {
    const CavityParams p = reference_params();
    double prev = -1.0;
    for (double t = 0.0; t <= 30.0; t += 0.25) {
        const double v = analytic_variance(t, p);
        CHECK(v >= prev);
        CHECK(v <= 0.25 + 1e-12);
        prev = v;
    }
}

TEST_CASE("exact_sample limits") {
    const CavityParams p = reference_params();
    GaussianStream s1(5u);
    CHECK(exact_sample(cdouble{0.7, 0.1}, 0.0, s1, p) == cdouble{0.7, 0.1});
    const CavityParams lossless(1.0, 0.5, 0.0);
    GaussianStream s2(5u);
    const cdouble got = exact_sample(cdouble{1.0, 0.0}, 2.0, s2, lossless);
    CHECK(std::abs(got - analytic_mean(cdouble{1.0, 0.0}, 2.0, lossless)) == 0.0);
    CHECK_THROWS_AS(exact_sample(cdouble{1.0, 0.0}, -0.1, s2, p), std::invalid_argument);
}

TEST_CASE("exact sampler matches the quadrature-oracle variance, 3 SE") {
    const CavityParams p = reference_params();
    const std::size_t n = 30000;
    const double t = 2.0;
    GaussianStream stream(20260101u);
    std::vector<cdouble> samples(n);
    for (auto& s : samples) s = exact_sample(cdouble{0.5, 0.0}, t, stream, p);
    cdouble mean{0.0, 0.0};
    for (const auto& s : samples) mean += s;
    mean /= static_cast<double>(n);
    double sum_d2 = 0.0, sum_d4 = 0.0;
    for (const auto& s : samples) {
        const double d2 = std::norm(s - mean);
        sum_d2 += d2;
        sum_d4 += d2 * d2;
    }
    const double var = sum_d2 / static_cast<double>(n - 1);
    const double mean_d2 = sum_d2 / static_cast<double>(n);
    const double se = std::sqrt((sum_d4 / n - mean_d2 * mean_d2) / n);
    CHECK(std::abs(var - variance_by_quadrature(t, p)) < 3.0 * se);
}

TEST_CASE("simulate_ensemble: single lossless trajectory is the decay curve") {
    const CavityParams lossless(1.0, 0.5, 0.0);
    Ensemble ens = simulate_ensemble(cdouble{1.0, 0.0}, IntegratorConfig(0.01, 2.0, 10), 1,
                                     RngSeed{9}, lossless, SdeMethod::exact, 1);
    for (std::size_t i = 0; i < ens.n_times(); ++i) {
        const cdouble expected = analytic_mean(cdouble{1.0, 0.0}, ens.times()[i], lossless);
        CHECK(std::abs(ens.value(0, i) - expected) < 1e-12);
    }
    Trajectory t0 = ens.trajectory(0);
    CHECK(t0.master_seed == 9);
    CHECK(t0.index == 0);
    CHECK(t0.times.size() == t0.values.size());
}

TEST_CASE("ensembles are bitwise reproducible and thread-count independent") {
    const CavityParams p = reference_params();
    const IntegratorConfig cfg(1e-2, 1.0, 10);
    Ensemble a = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 500, RngSeed{1234}, p,
                                   SdeMethod::euler_maruyama, 1);
    Ensemble b = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 500, RngSeed{1234}, p,
                                   SdeMethod::euler_maruyama, 3);
    Ensemble c = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 500, RngSeed{1234}, p,
                                   SdeMethod::euler_maruyama, 7);
    REQUIRE(a.n_times() == b.n_times());
    for (std::size_t k = 0; k < a.n_trajectories(); ++k)
        for (std::size_t i = 0; i < a.n_times(); ++i) {
            // bit-for-bit, not approximately
            CHECK(a.value(k, i) == b.value(k, i));
            CHECK(a.value(k, i) == c.value(k, i));
        }
    Ensemble other = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 500, RngSeed{1235}, p,
                                       SdeMethod::euler_maruyama, 1);
    bool any_diff = false;
    for (std::size_t k = 0; k < a.n_trajectories() && !any_diff; ++k)
        for (std::size_t i = 1; i < a.n_times(); ++i)
            if (a.value(k, i) != other.value(k, i)) { any_diff = true; break; }
    CHECK(any_diff);
}

TEST_CASE("EM ensemble mean agrees with the analytic mean within 3 SE") {
    const CavityParams p = reference_params();
    Ensemble ens = simulate_ensemble(cdouble{0.5, 0.0}, IntegratorConfig(1e-3, 2.0, 2000), 10000,
                                     RngSeed{77}, p, SdeMethod::euler_maruyama);
    auto stats = ensemble_stats(ens);
    const MomentStats& last = stats.back();
    const cdouble expected = analytic_mean(cdouble{0.5, 0.0}, last.t, p);
    CHECK(std::abs(last.mean - expected) < 3.0 * last.mean_std_error);
}

TEST_CASE("exact and EM ensembles agree in mean and variance within 3 sigma") {
    const CavityParams p = reference_params();
    const IntegratorConfig cfg(1e-3, 2.0, 2000);
    Ensemble em = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 10000, RngSeed{31}, p,
                                    SdeMethod::euler_maruyama);
    Ensemble ex = simulate_ensemble(cdouble{0.5, 0.0}, cfg, 10000, RngSeed{32}, p,
                                    SdeMethod::exact);
    const MomentStats em_s = ensemble_stats(em).back();
    const MomentStats ex_s = ensemble_stats(ex).back();
    const double mean_se = std::hypot(em_s.mean_std_error, ex_s.mean_std_error);
    const double var_se = std::hypot(em_s.variance_std_error, ex_s.variance_std_error);
    CHECK(std::abs(em_s.mean - ex_s.mean) < 3.0 * mean_se);
    CHECK(std::abs(em_s.variance - ex_s.variance) < 3.0 * var_se);
}

TEST_CASE("moment ODEs match exact-ensemble statistics at every grid point") {
    const CavityParams p = reference_params();
    const cdouble alpha0{0.5, 0.0};
    Ensemble ens = simulate_ensemble(alpha0, IntegratorConfig(0.25, 5.0, 2), 20000,
                                     RngSeed{607}, p, SdeMethod::exact);
    const auto stats = ensemble_stats(ens);
    const MomentState m0{alpha0, std::norm(alpha0)};
    for (const auto& st : stats) {
        const MomentState ode = moment_ode_evolve(m0, st.t, p);
        if (st.t == 0.0) {
            CHECK(st.variance == 0.0);
            CHECK(st.mean == ode.m1);
            continue;
        }
        CHECK(std::abs(st.mean - ode.m1) < 3.0 * st.mean_std_error);
        const double central = ode.m2 - std::norm(ode.m1);
        CHECK(std::abs(st.variance - central) < 3.0 * st.variance_std_error);
    }
}

TEST_CASE("ensemble_stats: hand-checked estimators") {
    const CavityParams p = reference_params();
    // one constant trajectory
    Ensemble single(std::vector<double>{0.0, 1.0}, 1, p, RngSeed{0}, SdeMethod::exact);
    single.row(0)[0] = cdouble{0.3, 0.3};
    single.row(0)[1] = cdouble{0.3, 0.3};
    auto stats1 = ensemble_stats(single);
    CHECK(stats1[0].variance == 0.0);
    CHECK(stats1[1].variance == 0.0);

    // two trajectories z and -z: mean 0, variance 2|z|^2 under the 1/(N-1) estimator
    Ensemble pair(std::vector<double>{0.0}, 2, p, RngSeed{0}, SdeMethod::exact);
    pair.row(0)[0] = cdouble{1.0, 0.0};
    pair.row(1)[0] = cdouble{-1.0, 0.0};
    auto stats2 = ensemble_stats(pair);
    CHECK(std::abs(stats2[0].mean) == 0.0);
    CHECK(stats2[0].variance == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("EM weak convergence: error ratio ~2 under common random numbers") {
    const CavityParams p = reference_params();
    const cdouble alpha0{2.0, 0.0};
    const double t = 2.0;
    const double dt_fine = 0.025, dt_coarse = 0.05;
    const std::size_t n_traj = 100000;
    const std::size_t steps_fine = 80;

    cdouble sum_fine{0.0, 0.0}, sum_coarse{0.0, 0.0};
    for (std::size_t k = 0; k < n_traj; ++k) {
        GaussianStream stream = stream_for_trajectory(RngSeed{321}, k);
        std::vector<cdouble> inc(steps_fine);
        for (auto& d : inc) d = wiener_increment(stream, dt_fine);
        cdouble fine = alpha0;
        for (std::size_t s = 0; s < steps_fine; ++s) fine = em_step(fine, dt_fine, inc[s], p);
        cdouble coarse = alpha0;
        for (std::size_t s = 0; s < steps_fine / 2; ++s)
            coarse = em_step(coarse, dt_coarse, inc[2 * s] + inc[2 * s + 1], p);
        sum_fine += fine;
        sum_coarse += coarse;
    }
    const cdouble exact = analytic_mean(alpha0, t, p);
    const double err_fine = std::abs(sum_fine / static_cast<double>(n_traj) - exact);
    const double err_coarse = std::abs(sum_coarse / static_cast<double>(n_traj) - exact);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.7);
}

TEST_CASE("moment ODE: closed form, fixed point, variance identity") {
    const CavityParams p = reference_params();
    const MomentState m0{cdouble{0.5, -0.25}, 0.3125};
    const MomentState still = moment_ode_evolve(m0, 0.0, p);
    CHECK(still.m1 == m0.m1);
    CHECK(still.m2 == m0.m2);

    // fixed point of dm2/dt = -2g m2 + kappa
    const MomentState fp{cdouble{0.0, 0.0}, 0.25};
    for (double t : {0.5, 3.0, 12.0}) {
        const MomentState evolved = moment_ode_evolve(fp, t, p);
        CHECK(std::abs(evolved.m1) == 0.0);
        CHECK(evolved.m2 == doctest::Approx(0.25).epsilon(1e-14));
    }

    // m2(t) - |m1(t)|^2 = analytic_variance(t) for a deterministic start
    const cdouble a0{0.8, 0.4};
    const MomentState det{a0, std::norm(a0)};
    for (double t : {0.1, 1.0, 4.0}) {
        const MomentState evolved = moment_ode_evolve(det, t, p);
        const double central = evolved.m2 - std::norm(evolved.m1);
        CHECK(std::abs(central - analytic_variance(t, p)) < 1e-12);
    }
}

TEST_CASE("ensemble_stats rejects an empty ensemble") {
    const CavityParams p = reference_params();
    Ensemble empty(std::vector<double>{0.0}, 0, p, RngSeed{0}, SdeMethod::exact);
    CHECK_THROWS_AS(ensemble_stats(empty), std::invalid_argument);
    CHECK_THROWS_AS(simulate_ensemble(cdouble{0.0, 0.0}, IntegratorConfig(0.1, 1.0), 0, RngSeed{0},
                                      p, SdeMethod::exact),
                    std::invalid_argument);
}
