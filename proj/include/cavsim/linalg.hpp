#pragma once

// Dense complex linear algebra for small operators (dim <= ~200).
// Row-major storage throughout; no sparsity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavsim {

using cdouble = std::complex<double>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cdouble{0.0, 0.0}) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cdouble& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cdouble& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    cdouble* data() { return a_.data(); }
    const cdouble* data() const { return a_.data(); }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cdouble s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError("matrix shape mismatch: " + shape_str() + " vs " + o.shape_str());
    }
    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cdouble> a_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(cdouble s, Matrix a) { return a *= s; }
inline Matrix operator*(Matrix a, cdouble s) { return a *= s; }
inline Matrix operator*(double s, Matrix a) { return a *= cdouble(s); }
inline Matrix operator-(const Matrix& a) { return cdouble(-1.0) * a; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matrix product shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    Matrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        cdouble* ci = &c(i, 0);
        for (std::size_t k = 0; k < m; ++k) {
            const cdouble aik = a(i, k);
            if (aik == cdouble{0.0, 0.0}) continue;
            const cdouble* bk = &b(k, 0);
            for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

using Vector = std::vector<cdouble>;

inline Vector operator*(const Matrix& a, const Vector& v) {
    if (a.cols() != v.size())
        throw DimensionError("matrix-vector shape mismatch");
    Vector out(a.rows(), cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cdouble acc{0.0, 0.0};
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

inline Matrix adjoint(const Matrix& a) {
    Matrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

inline cdouble trace(const Matrix& a) {
    if (!a.square()) throw DimensionError("trace requires a square matrix");
    cdouble t{0.0, 0.0};
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

inline double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

inline double max_abs(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j)));
    return s;
}

// max column sum, used by the exponential scaling heuristic
inline double one_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

inline cdouble dot(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DimensionError("vector dot shape mismatch");
    cdouble s{0.0, 0.0};
    for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
    return s;
}

inline double vec_norm(const Vector& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

// Solves A X = B by LU with partial pivoting. A must be square.
inline Matrix lu_solve(Matrix a, Matrix b) {
    if (!a.square()) throw DimensionError("lu_solve requires a square matrix");
    if (a.rows() != b.rows()) throw DimensionError("lu_solve rhs shape mismatch");
    const std::size_t n = a.rows(), m = b.cols();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best < 1e-300) throw SingularMatrixError("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        const cdouble akk = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cdouble f = a(i, k) / akk;
            if (f == cdouble{0.0, 0.0}) continue;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = 0; j < m; ++j) {
            cdouble acc = b(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) acc -= a(ii, k) * b(k, j);
            b(ii, j) = acc / a(ii, ii);
        }
    }
    return b;
}

struct EigenSystem {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are the corresponding eigenvectors
};

// Cyclic complex Jacobi for Hermitian matrices. Quadratic convergence;
// enough for the dimensions this library uses.
inline EigenSystem hermitian_eigensystem(Matrix a) {
    if (!a.square()) throw DimensionError("eigensystem requires a square matrix");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    if (n == 1) return {{a(0, 0).real()}, v};

    const double scale = std::max(frobenius_norm(a), 1e-300);
    const double tol = 1e-15 * scale;
    const int max_sweeps = 80;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(2.0 * off) < tol) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cdouble apq = a(p, q);
                const double g = std::abs(apq);
                if (g < tol / n) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const cdouble phase = apq / g;  // a(p,q) = g * phase
                const double tau = (app - aqq) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cdouble sp = s * phase;

                // A <- J^H A J with J = [[c, -sp],[conj(sp), c]] on (p,q)
                for (std::size_t r = 0; r < n; ++r) {
                    const cdouble arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp + std::conj(sp) * arq;
                    a(r, q) = -sp * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cdouble apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr + sp * aqr;
                    a(q, r) = -std::conj(sp) * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cdouble vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp + std::conj(sp) * vrq;
                    v(r, q) = -sp * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenSystem es;
    es.values.resize(n);
    es.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        es.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) es.vectors(r, k) = v(r, order[k]);
    }
    return es;
}

inline double min_hermitian_eigenvalue(const Matrix& a) {
    return hermitian_eigensystem(a).values.front();
}

// Spectral norm: sqrt of the largest eigenvalue of A^H A.
inline double operator_norm(const Matrix& a) {
    const Matrix g = adjoint(a) * a;
    const double lmax = hermitian_eigensystem(g).values.back();
    return std::sqrt(std::max(lmax, 0.0));
}

// Spectral norm of the submatrix formed by the first k columns, i.e. the norm
// of A restricted to inputs from the leading k basis states.
inline double operator_norm_leading_columns(const Matrix& a, std::size_t k) {
    if (k == 0 || k > a.cols()) throw DimensionError("invalid leading-column count");
    Matrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            cdouble acc{0.0, 0.0};
            for (std::size_t r = 0; r < a.rows(); ++r) acc += std::conj(a(r, i)) * a(r, j);
            g(i, j) = acc;
        }
    const double lmax = hermitian_eigensystem(g).values.back();
    return std::sqrt(std::max(lmax, 0.0));
}

// e^A by Pade-13 with scaling and squaring (Higham 2005). Accurate to
// ~1e-14 relative at the norms used here.
inline Matrix matrix_exp(const Matrix& a) {
    if (!a.square()) throw DimensionError("matrix_exp requires a square matrix");
    const std::size_t n = a.rows();
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double nrm = one_norm(a);
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Matrix x = a;
    if (s > 0) x *= cdouble(std::ldexp(1.0, -s));

    const Matrix id = Matrix::identity(n);
    const Matrix x2 = x * x;
    const Matrix x4 = x2 * x2;
    const Matrix x6 = x2 * x4;

    Matrix u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) +
                    b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
    Matrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) +
               b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

    Matrix r = lu_solve(v - u, v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

// e^A for skew-Hermitian A via eigendecomposition of -iA. Kept separate from
// matrix_exp so the two routes can cross-check each other.
inline Matrix matrix_exp_skew_hermitian(const Matrix& a) {
    if (!a.square()) throw DimensionError("matrix_exp requires a square matrix");
    const std::size_t n = a.rows();
    Matrix h(n, n);
    const cdouble minus_i{0.0, -1.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = minus_i * a(i, j);
    const EigenSystem es = hermitian_eigensystem(h);  // a = i h, h Hermitian
    Matrix d(n, n);
    for (std::size_t k = 0; k < n; ++k)
        d(k, k) = std::exp(cdouble{0.0, es.values[k]});
    return es.vectors * d * adjoint(es.vectors);
}

}  // namespace cavsim
