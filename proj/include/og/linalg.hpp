#pragma once

#include <cmath>
#include <numeric>
#include <utility>

#include "og/errors.hpp"
#include "og/matrix.hpp"

namespace og {

// ---------------------------------------------------------------------------
// LU factorization with partial pivoting
// ---------------------------------------------------------------------------

class LuFactor {
public:
    explicit LuFactor(Matrix m) : lu_(std::move(m)), perm_(lu_.rows()) {
        if (lu_.rows() != lu_.cols()) throw std::invalid_argument("lu: matrix not square");
        const int n = lu_.rows();
        std::iota(perm_.begin(), perm_.end(), 0);
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double m = std::abs(lu_(i, k));
                if (m > best) {
                    best = m;
                    piv = i;
                }
            }
            if (!(best > 0.0) || !std::isfinite(best))
                throw numeric_error("lu: matrix is singular to working precision");
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            const double d = lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) / d;
                lu_(i, k) = f;
                if (f == 0.0) continue;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    Vec solve(const Vec& b) const {
        const int n = lu_.rows();
        if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu solve: length mismatch");
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (int i = 1; i < n; ++i) {
            double s = x[i];
            for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    Matrix solve(const Matrix& b) const {
        Matrix x(b.rows(), b.cols());
        for (int j = 0; j < b.cols(); ++j) {
            Vec xj = solve(b.col(j));
            for (int i = 0; i < b.rows(); ++i) x(i, j) = xj[i];
        }
        return x;
    }

private:
    Matrix lu_;
    std::vector<int> perm_;
};

inline double relative_residual(const Matrix& m, const Vec& x, const Vec& b) {
    const Vec r = m * x - b;
    const double denom = inf_norm(m) * inf_norm(x) + inf_norm(b);
    if (denom == 0.0) return inf_norm(r);
    return inf_norm(r) / denom;
}

/// Solves Mx = b by row-pivoted elimination, refining until the relative
/// residual ||Mx-b|| / (||M|| ||x|| + ||b||) is at or below `tol`.
inline Vec solve_linear(const Matrix& m, const Vec& b, double tol = 1e-10) {
    LuFactor f(m);
    Vec x = f.solve(b);
    for (int pass = 0; pass < 2 && relative_residual(m, x, b) > tol; ++pass) {
        Vec r = m * x - b;
        Vec dx = f.solve(r);
        x = x - dx;
    }
    if (relative_residual(m, x, b) > tol)
        throw numeric_error("solve_linear: residual did not reach tolerance; system too ill-conditioned");
    return x;
}

inline Matrix inverse(const Matrix& m) {
    LuFactor f(m);
    return f.solve(Matrix::identity(m.rows()));
}

// ---------------------------------------------------------------------------
// Cholesky
// ---------------------------------------------------------------------------

/// Upper-triangular factor R with M = R'R and positive diagonal.
struct CholeskyFactor {
    Matrix r;
};

inline CholeskyFactor cholesky(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const int n = m.rows();
    Matrix r(n, n);
    for (int i = 0; i < n; ++i) {
        double d = m(i, i);
        for (int k = 0; k < i; ++k) d -= r(k, i) * r(k, i);
        if (!(d > 0.0) || !std::isfinite(d))
            throw numeric_error("cholesky: matrix is not positive definite");
        const double rii = std::sqrt(d);
        r(i, i) = rii;
        for (int j = i + 1; j < n; ++j) {
            double s = 0.5 * (m(i, j) + m(j, i));
            for (int k = 0; k < i; ++k) s -= r(k, i) * r(k, j);
            r(i, j) = s / rii;
        }
    }
    return {r};
}

/// Back substitution for Rx = b, R upper triangular.
inline Vec solve_upper(const Matrix& r, const Vec& b) {
    const int n = r.rows();
    Vec x(b);
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= r(i, j) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

/// Forward substitution for R'x = b, R upper triangular.
inline Vec solve_upper_transposed(const Matrix& r, const Vec& b) {
    const int n = r.rows();
    Vec x(b);
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= r(j, i) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues ascending; eigenvectors as orthonormal columns, each with
/// its largest-magnitude entry positive (ties broken by lowest index).
struct SymmetricEigenDecomposition {
    Vec eigenvalues;
    Matrix eigenvectors;
};

inline SymmetricEigenDecomposition sym_eigen(const Matrix& m_in) {
    if (m_in.rows() != m_in.cols()) throw std::invalid_argument("sym_eigen: matrix not square");
    const int n = m_in.rows();
    Matrix a = symmetrize(m_in);
    Matrix q = Matrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(1.0, max_abs(a));
    const double stop = 1e-15 * scale * n;
    for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (std::abs(apr) <= 1e-300) {
                    a(p, r) = a(r, p) = 0.0;
                    continue;
                }
                // Rotation angle per the standard two-sided Jacobi formulas.
                const double tau = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = q(k, p);
                    const double qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    SymmetricEigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        Vec v = q.col(order[j]);
        canonical_sign(v);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generalized symmetric-definite eigenproblem
// ---------------------------------------------------------------------------

struct GenEigenMax {
    double lambda;
    Vec vector;  // B-normalized: x'Bx = 1
};

/// Largest lambda with Cx = lambda Bx for symmetric C and positive
/// definite B, via the Cholesky reduction B = R'R followed by a standard
/// symmetric solve on R^{-T} C R^{-1}.
inline GenEigenMax gen_eigen_max(const Matrix& c, const Matrix& b) {
    if (c.rows() != c.cols() || b.rows() != b.cols() || c.rows() != b.rows())
        throw std::invalid_argument("gen_eigen_max: shape mismatch");
    const int n = c.rows();
    if (n == 0) throw std::invalid_argument("gen_eigen_max: empty problem");
    const Matrix r = cholesky(b).r;

    // S = R^{-T} C R^{-1}, formed column by column with triangular solves.
    Matrix x(n, n);
    for (int j = 0; j < n; ++j) {
        Vec cj = solve_upper_transposed(r, c.col(j));
        for (int i = 0; i < n; ++i) x(i, j) = cj[i];
    }
    Matrix s(n, n);
    for (int i = 0; i < n; ++i) {
        Vec row(n);
        for (int j = 0; j < n; ++j) row[j] = x(i, j);
        Vec si = solve_upper_transposed(r, row);
        for (int j = 0; j < n; ++j) s(i, j) = si[j];
    }

    SymmetricEigenDecomposition e = sym_eigen(s);
    const double lambda = e.eigenvalues[n - 1];
    Vec u = e.eigenvectors.col(n - 1);
    Vec xvec = solve_upper(r, u);
    return {lambda, xvec};
}

}  // namespace og
