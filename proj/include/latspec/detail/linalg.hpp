#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "latspec/complex_matrix.hpp"

namespace latspec::detail {

inline double norm2(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline cdouble dotc(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline void scale(std::vector<cdouble>& v, cdouble a) {
    for (auto& z : v) z *= a;
}

inline void axpy(cdouble a, const std::vector<cdouble>& x, std::vector<cdouble>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

/// Deterministic pseudo-random unit-norm vector (fixed mt19937_64 stream).
inline std::vector<cdouble> seeded_unit_vector(std::size_t n, std::uint64_t seed,
                                               bool complex_parts = true) {
    std::mt19937_64 gen(0x9e3779b97f4a7c15ull ^ seed);
    auto u = [&gen]() {
        return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
    };
    std::vector<cdouble> v(n);
    for (auto& z : v) {
        const double re = u();
        const double im = complex_parts ? u() : 0.0;
        z = cdouble{re, im};
    }
    const double nn = norm2(v);
    if (nn > 0.0) scale(v, cdouble{1.0 / nn, 0.0});
    return v;
}

/// LU factorization of a tridiagonal matrix with partial pivoting
/// (row swaps introduce a second superdiagonal). Scalar is double or
/// std::complex<double>.
template <class Scalar>
struct TridiagLU {
    std::vector<Scalar> dl, d, du, du2;
    std::vector<int> pivot_next;  // 1 when rows i, i+1 were swapped
    std::size_t n = 0;

    TridiagLU(std::vector<Scalar> sub, std::vector<Scalar> diag, std::vector<Scalar> super)
        : dl(std::move(sub)), d(std::move(diag)), du(std::move(super)) {
        n = d.size();
        if (n == 0) throw std::invalid_argument("TridiagLU: empty matrix");
        if (dl.size() != n - 1 || du.size() != n - 1)
            throw std::invalid_argument("TridiagLU: band length mismatch");
        du2.assign(n >= 2 ? n - 2 : 0, Scalar{});
        pivot_next.assign(n >= 1 ? n - 1 : 0, 0);
        factor();
    }

    /// Solve in place. Exactly singular pivots are nudged to `pivot_floor`
    /// so shifted solves at an eigenvalue still return a usable direction.
    void solve(std::vector<cdouble>& b, double pivot_floor) const {
        if (b.size() != n) throw std::invalid_argument("TridiagLU::solve: size mismatch");
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!pivot_next[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const cdouble tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl[i] * b[i];
            }
        }
        auto piv = [&](std::size_t i) -> Scalar {
            const Scalar p = d[i];
            if (std::abs(p) >= pivot_floor) return p;
            return p == Scalar{} ? Scalar{pivot_floor} : p;
        };
        b[n - 1] /= piv(n - 1);
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / piv(n - 2);
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / piv(i);
        }
    }

  private:
    void factor() {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] != Scalar{}) {
                    const Scalar fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = Scalar{};
                }
            } else {
                const Scalar fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const Scalar tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                pivot_next[i] = 1;
            }
        }
    }
};

/// Dense complex LU with partial pivoting; enough for inverse iteration on
/// closed chains at the general-path scale.
struct DenseLU {
    std::size_t n = 0;
    std::vector<cdouble> a;  // row-major, factors in place
    std::vector<std::size_t> perm;

    explicit DenseLU(const ComplexMatrix& m) : n(m.dim), a(m.entries), perm(m.dim) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        factor();
    }

    void solve(std::vector<cdouble>& b, double pivot_floor) const {
        if (b.size() != n) throw std::invalid_argument("DenseLU::solve: size mismatch");
        std::vector<cdouble> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= a[i * n + j] * x[j];
        for (std::size_t k = n; k-- > 0;) {
            for (std::size_t j = k + 1; j < n; ++j) x[k] -= a[k * n + j] * x[j];
            cdouble p = a[k * n + k];
            if (std::abs(p) < pivot_floor) p = (p == cdouble{}) ? cdouble{pivot_floor} : p;
            x[k] /= p;
        }
        b = std::move(x);
    }

  private:
    void factor() {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(a[k * n + k]);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(a[i * n + k]);
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
                std::swap(perm[k], perm[piv]);
            }
            const cdouble pk = a[k * n + k];
            if (pk == cdouble{}) continue;  // singular column; solve() floors the pivot
            for (std::size_t i = k + 1; i < n; ++i) {
                const cdouble f = a[i * n + k] / pk;
                a[i * n + k] = f;
                if (f == cdouble{}) continue;
                for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
};

/// Singular values of the matrix whose columns are `cols`, by one-sided
/// Jacobi orthogonalization. Descending order. High relative accuracy for
/// small values, which the rank estimates below depend on.
inline std::vector<double> singular_values(std::vector<std::vector<cdouble>> cols) {
    const std::size_t m = cols.size();
    if (m == 0) return {};
    for (int sweep = 0; sweep < 60; ++sweep) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double alpha = dotc(cols[i], cols[i]).real();
                const double beta = dotc(cols[j], cols[j]).real();
                const cdouble gamma = dotc(cols[i], cols[j]);
                const double g = std::abs(gamma);
                if (alpha == 0.0 || beta == 0.0) continue;
                const double rel = g / std::sqrt(alpha * beta);
                worst = std::max(worst, rel);
                if (rel <= 1e-14) continue;
                const cdouble phase = gamma / g;
                const double tau = (beta - alpha) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < cols[i].size(); ++k) {
                    const cdouble u = cols[i][k];
                    const cdouble v = std::conj(phase) * cols[j][k];
                    cols[i][k] = c * u - s * v;
                    cols[j][k] = s * u + c * v;
                }
            }
        }
        if (worst <= 1e-14) break;
    }
    std::vector<double> sv(m);
    for (std::size_t i = 0; i < m; ++i) sv[i] = norm2(cols[i]);
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

/// Count of singular values above rel_tol * largest.
inline std::size_t numerical_rank(const std::vector<double>& sv, double rel_tol) {
    if (sv.empty() || sv.front() == 0.0) return 0;
    std::size_t r = 0;
    for (double s : sv)
        if (s > rel_tol * sv.front()) ++r;
    return r;
}

}  // namespace latspec::detail
