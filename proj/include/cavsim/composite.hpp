#pragma once

// System+bath composites at finite dimension: tensor products, partial
// trace over the bath, and the reduced Heisenberg-picture map that turns
// projectors into POVM elements.

#include <cstddef>
#include <stdexcept>

#include "cavsim/density.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

struct CompositeDims {
    CompositeDims(std::size_t dim_s_, std::size_t dim_b_) : dim_s(dim_s_), dim_b(dim_b_) {
        if (dim_s < 2 || dim_b < 2)
            throw DimensionError("CompositeDims requires dim_s >= 2 and dim_b >= 2");
    }
    std::size_t dim_s;
    std::size_t dim_b;

    std::size_t total() const { return dim_s * dim_b; }
};

// Kronecker product, system index slow / bath index fast. This ordering is
// fixed globally; every composite-space computation depends on it.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
    if (!a.square() || !b.square())
        throw DimensionError("tensor requires square factors");
    const std::size_t na = a.rows(), nb = b.rows();
    Matrix c(na * nb, na * nb);
    for (std::size_t is = 0; is < na; ++is)
        for (std::size_t js = 0; js < na; ++js) {
            const cdouble aij = a(is, js);
            if (aij == cdouble{0.0, 0.0}) continue;
            for (std::size_t ib = 0; ib < nb; ++ib)
                for (std::size_t jb = 0; jb < nb; ++jb)
                    c(is * nb + ib, js * nb + jb) = aij * b(ib, jb);
        }
    return c;
}

inline Matrix partial_trace_bath(const Matrix& rho, CompositeDims dims) {
    if (!rho.square() || rho.rows() != dims.total())
        throw DimensionError("partial_trace_bath: composite dimension mismatch");
    Matrix out(dims.dim_s, dims.dim_s);
    for (std::size_t is = 0; is < dims.dim_s; ++is)
        for (std::size_t js = 0; js < dims.dim_s; ++js) {
            cdouble acc{0.0, 0.0};
            for (std::size_t b = 0; b < dims.dim_b; ++b)
                acc += rho(is * dims.dim_b + b, js * dims.dim_b + b);
            out(is, js) = acc;
        }
    return out;
}

inline DensityOperator partial_trace_bath(const DensityOperator& rho, CompositeDims dims) {
    return DensityOperator(partial_trace_bath(rho.matrix(), dims));
}

// Reduced Heisenberg image of a system observable E:
//   Tr_b( U^H (E (x) 1_b) U * (1_s (x) rho_b) ).
// Hermitian if E is; maps effects 0 <= E <= 1 to effects, but generally
// destroys idempotence, which is the point of idempotence_defect below.
inline Matrix heisenberg_transition(const Matrix& e, const Matrix& u,
                                    const DensityOperator& rho_b, CompositeDims dims) {
    if (!e.square() || e.rows() != dims.dim_s)
        throw DimensionError("heisenberg_transition: E must act on the system factor");
    if (!u.square() || u.rows() != dims.total())
        throw DimensionError("heisenberg_transition: U must act on the composite space");
    if (rho_b.dim() != dims.dim_b)
        throw DimensionError("heisenberg_transition: bath state dimension mismatch");
    const double unit_defect = operator_norm(adjoint(u) * u - Matrix::identity(dims.total()));
    if (unit_defect > 1e-10)
        throw std::invalid_argument("heisenberg_transition: U not unitary, ||U^H U - I|| = " +
                                    std::to_string(unit_defect));
    const Matrix lifted = adjoint(u) * tensor(e, Matrix::identity(dims.dim_b)) * u;
    const Matrix weighted = lifted * tensor(Matrix::identity(dims.dim_s), rho_b.matrix());
    return partial_trace_bath(weighted, dims);
}

// Operator norm of F^2 - F; zero exactly when F is a projector.
inline double idempotence_defect(const Matrix& f) {
    if (!f.square()) throw DimensionError("idempotence_defect requires a square matrix");
    return operator_norm(f * f - f);
}

}  // namespace cavsim
