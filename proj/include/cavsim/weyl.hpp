#pragma once

// CCR Weyl operators W(z) = e^{z a - z* a^+} at finite truncation, the
// quasi-free transition semigroup they generate under pure damping,
//   T_t(W(z)) = e^{(e^{-2gt}-1)|z|^2/2} W(e^{-(g+iw)t} z),
// and the recovery of the damped ladder operators from its derivatives,
// cross-checked against direct Heisenberg-picture integration of the
// master equation.
//
// Norms in this module are sector-compressed. The truncated commutator
// [a, a^+] = diag(1, ..., 1, -(dim-1)) is wrong by O(dim) in its last
// entry, so no identity built from products of truncated Weyl exponentials
// can hold near the cutoff: measured over the whole space, the CCR residual
// stays O(1) at every dim. On input states from the lowest k Fock levels
// the identities hold with errors that fall superexponentially in dim,
// which is the convergence the checks below quantify. ccr_residual and
// lindblad_channel_crosscheck use k = dim/2 (the half of the basis a
// truncation is trusted on); the ladder-recovery error uses the tighter
// k = dim/4 because the finite-difference curvature term grows like the
// cube of the ladder norms, i.e. like k^{3/2}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <utility>

#include "cavsim/fock.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

struct WeylLabel {
    cdouble z;
};

// T_t maps W(z) to coefficient * W(label.z); coefficient lies in (0, 1].
struct SemigroupImage {
    double coefficient;
    WeylLabel label;
};

inline Matrix weyl_operator(cdouble z, FockDim dim) {
    if (std::norm(z) > static_cast<double>(dim.n) / 4.0)
        std::cerr << "cavsim: weyl_operator diagnostic: |z|^2 = " << std::norm(z)
                  << " exceeds dim/4 = " << dim.n / 4.0
                  << "; truncation error may be significant\n";
    const Matrix a = annihilation(dim);
    return matrix_exp(z * a - std::conj(z) * adjoint(a));
}

// Residual of W(f) W(h) = e^{i Im(conj(f) h)} W(f+h), measured on inputs
// from the lower half of the basis (see the header note on sector norms).
inline double ccr_residual(cdouble f, cdouble h, FockDim dim) {
    const Matrix wf = weyl_operator(f, dim);
    const Matrix wh = weyl_operator(h, dim);
    const Matrix wfh = weyl_operator(f + h, dim);
    const cdouble phase = std::exp(cdouble{0.0, std::imag(std::conj(f) * h)});
    const Matrix residual = wf * wh - phase * wfh;
    return operator_norm_leading_columns(residual, dim.n / 2);
}

inline SemigroupImage semigroup_on_label(cdouble z, double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup_on_label: t must be >= 0");
    const double g = p.g();
    const double coefficient = std::exp(0.5 * (std::exp(-2.0 * g * t) - 1.0) * std::norm(z));
    const cdouble label = std::exp(cdouble{-g * t, -p.omega * t}) * z;
    return {coefficient, {label}};
}

// |coeff(t+s, z) - coeff(t, z) coeff(s, label_t(z))| + |label composition
// mismatch|. An exact algebraic identity, so only rounding survives.
inline double semigroup_law_residual(double t, double s, cdouble z, const CavityParams& p) {
    if (!(t >= 0.0) || !(s >= 0.0))
        throw std::invalid_argument("semigroup_law_residual: t, s must be >= 0");
    const SemigroupImage whole = semigroup_on_label(z, t + s, p);
    const SemigroupImage first = semigroup_on_label(z, t, p);
    const SemigroupImage second = semigroup_on_label(first.label.z, s, p);
    const double coeff_mismatch =
        std::abs(whole.coefficient - first.coefficient * second.coefficient);
    const double label_mismatch = std::abs(whole.label.z - second.label.z);
    return coeff_mismatch + label_mismatch;
}

// Distance between the RK4-integrated Heisenberg-picture image of W(z)
// under the kappa = 0 master equation and the closed-form semigroup image,
// on the lower-half sector. The closed form exists only for the pure-loss
// cavity, so kappa = 0 is a hard precondition.
inline double lindblad_channel_crosscheck(cdouble z, double t, FockDim dim,
                                          const CavityParams& p, double dt = 1e-3) {
    if (p.kappa != 0.0)
        throw std::invalid_argument(
            "lindblad_channel_crosscheck: requires kappa = 0 (no closed form otherwise)");
    if (!(t >= 0.0)) throw std::invalid_argument("lindblad_channel_crosscheck: t must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("lindblad_channel_crosscheck: dt must be > 0");

    // kappa = 0 with gamma' > 0 is representable directly; the degenerate
    // closed-system parameter set is not meaningful here.
    CavityParams loss(p.omega, p.gamma_prime, 0.0, p.hbar, p.mass);
    const LindbladModel model = LindbladModel::cavity(loss, dim);

    Matrix x = weyl_operator(z, dim);
    const auto n_steps = static_cast<std::size_t>(t / dt + 0.5);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const Matrix k1 = adjoint_rhs(model, x);
        const Matrix k2 = adjoint_rhs(model, x + (0.5 * dt) * k1);
        const Matrix k3 = adjoint_rhs(model, x + (0.5 * dt) * k2);
        const Matrix k4 = adjoint_rhs(model, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    const SemigroupImage image = semigroup_on_label(z, t, loss);
    const Matrix closed_form = image.coefficient * weyl_operator(image.label.z, dim);
    return operator_norm_leading_columns(x - closed_form, dim.n / 2);
}

// Central finite differences of z -> T_t-image at z = 0 recover the damped
// ladder operators:
//   a(t)  =  d/dz   |_0  ->  e^{-(g+iw)t} a,
//   a+(t) = -d/dz*  |_0  ->  e^{-(g-iw)t} a^+.
// Error is O(h^2) plus truncation.
struct LadderRecovery {
    Matrix a_t;
    Matrix adag_t;
};

inline LadderRecovery recover_ladder(double t, FockDim dim, const CavityParams& p, double h = 1e-3) {
    if (!(t >= 0.0)) throw std::invalid_argument("recover_ladder: t must be >= 0");
    if (!(h >= 1e-4 && h <= 1e-2))
        throw std::invalid_argument("recover_ladder: h must lie in [1e-4, 1e-2]");

    auto image = [&](cdouble z) {
        const SemigroupImage im = semigroup_on_label(z, t, p);
        return im.coefficient * weyl_operator(im.label.z, dim);
    };

    const Matrix fx_p = image(cdouble{h, 0.0});
    const Matrix fx_m = image(cdouble{-h, 0.0});
    const Matrix fy_p = image(cdouble{0.0, h});
    const Matrix fy_m = image(cdouble{0.0, -h});

    const cdouble inv_2h{1.0 / (2.0 * h), 0.0};
    const Matrix dx = inv_2h * (fx_p - fx_m);
    const Matrix dy = inv_2h * (fy_p - fy_m);

    LadderRecovery out;
    const cdouble half{0.5, 0.0}, i{0.0, 1.0};
    out.a_t = half * (dx - i * dy);         //  d/dz
    out.adag_t = -1.0 * (half * (dx + i * dy));  // -d/dz*
    return out;
}

struct LadderRecoveryError {
    double a_error;
    double adag_error;
};

// Sector-compressed (k = dim/4) deviation of the recovered pair from the
// closed forms e^{-(g+iw)t} a and e^{-(g-iw)t} a^+.
inline LadderRecoveryError ladder_recovery_error(double t, FockDim dim, const CavityParams& p,
                                                 double h = 1e-3) {
    const LadderRecovery rec = recover_ladder(t, dim, p, h);
    const cdouble lambda = std::exp(cdouble{-p.g() * t, -p.omega * t});
    const Matrix a = annihilation(dim);
    const std::size_t k = std::max<std::size_t>(1, dim.n / 4);
    return {operator_norm_leading_columns(rec.a_t - lambda * a, k),
            operator_norm_leading_columns(rec.adag_t - std::conj(lambda) * adjoint(a), k)};
}

}  // namespace cavsim
