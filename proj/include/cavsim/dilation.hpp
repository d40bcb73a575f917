#pragma once

// Numerical realization of the minimal unitary dilation of the damped-mode
// contraction C_t(z) = e^{-(g+iw)t} z on the weighted space L^2(R, 2g dx):
// cyclic vector v(x) = e^{-(g+iw)x} on x >= 0, embedding J(z) = z v,
// left-shift group U_t, projection Pi(u) = <v, u>, and the residual of the
// commuting diagram Pi(U_t(J(z))) = C_t(z).
//
// The domain is truncated to [0, x_max]; everything the diagram touches is
// supported there, and the dropped tail carries mass e^{-2g x_max}. Shifts
// are restricted to exact grid multiples (no interpolation) so the
// refinement study sees only the quadrature and tail errors.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavsim/fock.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

struct GridAlignmentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DilationGrid {
    double x_max;
    std::size_t nx;
    double weight;  // 2g

    DilationGrid(double x_max_, std::size_t nx_, const CavityParams& p)
        : x_max(x_max_), nx(nx_), weight(2.0 * p.g()) {
        if (!(x_max > 0.0) || nx < 2)
            throw std::invalid_argument("DilationGrid: need x_max > 0 and nx >= 2");
        if (!(weight > 0.0))
            throw std::invalid_argument("DilationGrid: requires damping g > 0");
        if (x_max < 10.0 / weight)
            throw std::invalid_argument(
                "DilationGrid: x_max must be >= 10/(2g) so the dropped tail is below 1e-8");
    }

    static DilationGrid from_spacing(double dx, double x_max, const CavityParams& p) {
        if (!(dx > 0.0)) throw std::invalid_argument("DilationGrid: dx must be > 0");
        const auto nx = static_cast<std::size_t>(x_max / dx + 0.5);
        return DilationGrid(x_max, nx, p);
    }

    double dx() const { return x_max / static_cast<double>(nx); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
};

struct L2Vector {
    std::vector<cdouble> samples;  // u(x_i), x_i = i dx, i = 0..nx-1
};

inline void require_on_grid(const L2Vector& u, const DilationGrid& grid) {
    if (u.samples.size() != grid.nx)
        throw DimensionError("L2Vector does not match the grid (" +
                             std::to_string(u.samples.size()) + " vs " +
                             std::to_string(grid.nx) + " samples)");
}

inline cdouble contraction_apply(cdouble z, double t, const CavityParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("contraction_apply: t must be >= 0");
    return std::exp(cdouble{-p.g() * t, -p.omega * t}) * z;
}

inline L2Vector cyclic_vector(const DilationGrid& grid, const CavityParams& p) {
    L2Vector v;
    v.samples.resize(grid.nx);
    const cdouble rate{-p.g(), -p.omega};
    for (std::size_t i = 0; i < grid.nx; ++i)
        v.samples[i] = std::exp(rate * grid.x(i));
    return v;
}

// Left-endpoint Riemann approximation of int conj(u) w 2g dx over
// [0, x_max). First-order in dx; the refinement ladder in the diagram
// checks relies on this O(dx) scaling.
inline cdouble inner_product(const L2Vector& u, const L2Vector& w, const DilationGrid& grid) {
    require_on_grid(u, grid);
    require_on_grid(w, grid);
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < grid.nx; ++i)
        acc += std::conj(u.samples[i]) * w.samples[i];
    return acc * (grid.weight * grid.dx());
}

inline L2Vector embed_J(cdouble z, const DilationGrid& grid, const CavityParams& p) {
    L2Vector v = cyclic_vector(grid, p);
    for (auto& s : v.samples) s *= z;
    return v;
}

// [U_t u](x) = u(x + t) for t a nonnegative grid multiple; samples shifted
// past x_max are lost to the tail cutoff.
inline L2Vector shift_U(const L2Vector& u, double t, const DilationGrid& grid) {
    require_on_grid(u, grid);
    if (!(t >= 0.0)) throw GridAlignmentError("shift_U: t must be >= 0");
    const double steps = t / grid.dx();
    const auto k = static_cast<std::size_t>(steps + 0.5);
    if (std::abs(t - static_cast<double>(k) * grid.dx()) > 1e-9 * std::max(1.0, t))
        throw GridAlignmentError("shift_U: t = " + std::to_string(t) +
                                 " is not an integer multiple of dx = " +
                                 std::to_string(grid.dx()) + " (no silent interpolation)");
    L2Vector out;
    out.samples.assign(grid.nx, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i + k < grid.nx; ++i)
        out.samples[i] = u.samples[i + k];
    return out;
}

inline cdouble project_Pi(const L2Vector& u, const DilationGrid& grid, const CavityParams& p) {
    return inner_product(cyclic_vector(grid, p), u, grid);
}

// | Pi(U_t(J(z))) - C_t(z) |. Exactly zero in the continuum; on the grid it
// is bounded by C (dx + e^{-2g x_max}) |z|.
inline double diagram_residual(cdouble z, double t, const DilationGrid& grid,
                               const CavityParams& p) {
    const cdouble through_dilation = project_Pi(shift_U(embed_J(z, grid, p), t, grid), grid, p);
    return std::abs(through_dilation - contraction_apply(z, t, p));
}

}  // namespace cavsim
