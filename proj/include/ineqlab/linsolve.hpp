#ifndef INEQLAB_LINSOLVE_HPP
#define INEQLAB_LINSOLVE_HPP

// Dense-free linear algebra for the implicit stepper: a general banded LU
// with partial pivoting (the stacked Newton systems are narrow-banded once
// density and flux unknowns are interleaved), a tridiagonal solve for the
// 1D flux equation, and matrix-free conjugate gradients for the 2D one.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace ineqlab {

// Band storage: entry (i, j) with j - ku <= i <= j + kl lives at
// w[(i - j + ku + kl) * n + j]. The extra kl rows hold pivoting fill.
struct BandMatrix {
    int n = 0, kl = 0, ku = 0;
    std::vector<double> w;

    BandMatrix() = default;
    BandMatrix(int n_, int kl_, int ku_)
        : n(n_), kl(kl_), ku(ku_),
          w(static_cast<std::size_t>(2 * kl_ + ku_ + 1) * n_, 0.0) {}

    int rows() const { return 2 * kl + ku + 1; }
    std::size_t slot(int i, int j) const {
        return static_cast<std::size_t>(i - j + ku + kl) * n + j;
    }
    double get(int i, int j) const {
        if (j - ku > i || i > j + kl) return 0.0;
        return w[slot(i, j)];
    }
    void add(int i, int j, double v) { w[slot(i, j)] += v; }
    void set(int i, int j, double v) { w[slot(i, j)] = v; }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const int lo = j - ku < 0 ? 0 : j - ku;
            const int hi = j + kl >= n ? n - 1 : j + kl;
            for (int i = lo; i <= hi; ++i) y[i] += w[slot(i, j)] * x[j];
        }
        return y;
    }
};

// Reusable banded LU with partial pivoting. Rows are equilibrated to unit
// max before factoring; the stacked Newton systems mix O(1/h^2) density
// rows with O(tau) flux rows, and the raw condition number otherwise caps
// how far the outer iteration can push its residual.
class BandLU {
public:
    explicit BandLU(const BandMatrix& src) : a_(src), piv_(src.n), scale_(src.n, 1.0) {
        const int n = a_.n, kl = a_.kl, ku = a_.ku;
        const int kut = ku + kl;
        for (int i = 0; i < n; ++i) {
            double mx = 0.0;
            const int jlo = i - kl < 0 ? 0 : i - kl;
            const int jhi = i + ku >= n ? n - 1 : i + ku;
            for (int j = jlo; j <= jhi; ++j) mx = std::max(mx, std::abs(a_.w[a_.slot(i, j)]));
            if (!(mx > 0.0)) throw SolverError("band_lu: zero row");
            scale_[i] = 1.0 / mx;
            for (int j = jlo; j <= jhi; ++j) a_.w[a_.slot(i, j)] *= scale_[i];
        }
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::abs(a_.w[a_.slot(k, k)]);
            const int ilast = k + kl >= n ? n - 1 : k + kl;
            for (int i = k + 1; i <= ilast; ++i) {
                const double v = std::abs(a_.w[a_.slot(i, k)]);
                if (v > best) { best = v; p = i; }
            }
            if (!(best > 0.0)) throw SolverError("band_lu: singular pivot");
            piv_[k] = p;
            const int jlast = k + kut >= n ? n - 1 : k + kut;
            if (p != k)
                for (int j = k; j <= jlast; ++j)
                    std::swap(a_.w[a_.slot(k, j)], a_.w[a_.slot(p, j)]);
            const double pivot = a_.w[a_.slot(k, k)];
            for (int i = k + 1; i <= ilast; ++i) {
                const double m = a_.w[a_.slot(i, k)] / pivot;
                a_.w[a_.slot(i, k)] = m;
                if (m != 0.0)
                    for (int j = k + 1; j <= jlast; ++j)
                        a_.w[a_.slot(i, j)] -= m * a_.w[a_.slot(k, j)];
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        const int n = a_.n, kl = a_.kl, ku = a_.ku;
        const int kut = ku + kl;
        for (int i = 0; i < n; ++i) b[i] *= scale_[i];
        for (int k = 0; k < n; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            const int ilast = k + kl >= n ? n - 1 : k + kl;
            for (int i = k + 1; i <= ilast; ++i) b[i] -= a_.w[a_.slot(i, k)] * b[k];
        }
        for (int k = n - 1; k >= 0; --k) {
            const int jlast = k + kut >= n ? n - 1 : k + kut;
            double s = b[k];
            for (int j = k + 1; j <= jlast; ++j) s -= a_.w[a_.slot(k, j)] * b[j];
            b[k] = s / a_.w[a_.slot(k, k)];
        }
        return b;
    }

    // Solve with one pass of iterative refinement against the original
    // matrix, extended-precision residual. Recovers the digits the
    // factorization loses on ill-scaled systems.
    std::vector<double> solve_refined(const BandMatrix& orig,
                                      const std::vector<double>& b) const {
        std::vector<double> x = solve(b);
        const int n = orig.n;
        std::vector<long double> resid(n);
        for (int i = 0; i < n; ++i) resid[i] = b[i];
        for (int j = 0; j < n; ++j) {
            const int lo = j - orig.ku < 0 ? 0 : j - orig.ku;
            const int hi = j + orig.kl >= n ? n - 1 : j + orig.kl;
            for (int i = lo; i <= hi; ++i)
                resid[i] -= static_cast<long double>(orig.w[orig.slot(i, j)]) * x[j];
        }
        std::vector<double> r2(n);
        for (int i = 0; i < n; ++i) r2[i] = static_cast<double>(resid[i]);
        std::vector<double> corr = solve(std::move(r2));
        for (int i = 0; i < n; ++i) x[i] += corr[i];
        return x;
    }

private:
    BandMatrix a_;
    std::vector<int> piv_;
    std::vector<double> scale_;
};

inline std::vector<double> band_solve(const BandMatrix& a, std::vector<double> b) {
    return BandLU(a).solve(std::move(b));
}

// Tridiagonal solve (Thomas). Safe without pivoting for the strictly
// diagonally dominant systems produced by the flux discretization.
inline std::vector<double> tridiagonal_solve(std::vector<double> lower,
                                             std::vector<double> diag,
                                             std::vector<double> upper,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw SolverError("tridiagonal_solve: zero pivot");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw SolverError("tridiagonal_solve: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    return rhs;
}

// Conjugate gradients on a caller-supplied SPD operator, with Jacobi
// preconditioning. Converges to a relative residual or throws.
inline std::vector<double> cg_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& apply,
    const std::vector<double>& rhs, const std::vector<double>& inv_diag,
    double rel_tol, int max_iter) {
    const std::size_t n = rhs.size();
    std::vector<double> x(n, 0.0), r = rhs, z(n), p(n);
    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return x;
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> ap = apply(p);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) throw SolverError("cg_solve: operator not positive definite");
        const double alpha = rz / pap;
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rnorm += r[i] * r[i];
        }
        if (std::sqrt(rnorm) <= rel_tol * bnorm) return x;
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("cg_solve: no convergence within iteration budget");
}

} // namespace ineqlab

#endif
