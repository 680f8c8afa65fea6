#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "latspec/detail/linalg.hpp"
#include "latspec/spectrum.hpp"

namespace latspec {
namespace detail {

struct SturmContext {
    std::vector<double> d;
    std::vector<double> e;
    std::vector<double> e2;
    double pivmin = 0.0;
    double norm_inf = 1.0;
    double lo = 0.0, hi = 0.0;  // Gerschgorin bracket
};

inline SturmContext make_sturm_context(std::vector<double> diag, std::vector<double> offdiag) {
    SturmContext ctx;
    ctx.d = std::move(diag);
    ctx.e = std::move(offdiag);
    const std::size_t n = ctx.d.size();
    ctx.e2.resize(ctx.e.size());
    double max_e2 = 0.0;
    for (std::size_t i = 0; i < ctx.e.size(); ++i) {
        ctx.e2[i] = ctx.e[i] * ctx.e[i];
        max_e2 = std::max(max_e2, ctx.e2[i]);
    }
    const double tiny = std::numeric_limits<double>::min();
    ctx.pivmin = std::max(tiny, tiny * max_e2);
    ctx.lo = std::numeric_limits<double>::infinity();
    ctx.hi = -std::numeric_limits<double>::infinity();
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(ctx.e[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(ctx.e[i]) : 0.0);
        ctx.lo = std::min(ctx.lo, ctx.d[i] - r);
        ctx.hi = std::max(ctx.hi, ctx.d[i] + r);
        nrm = std::max(nrm, std::abs(ctx.d[i]) + r);
    }
    ctx.norm_inf = nrm;
    return ctx;
}

/// Number of eigenvalues below x, by the signs of the LDL^t pivots of T - xI.
inline std::size_t count_below(const SturmContext& ctx, double x) {
    std::size_t cnt = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < ctx.d.size(); ++i) {
        q = (ctx.d[i] - x) - (i > 0 ? ctx.e2[i - 1] / q : 0.0);
        if (std::abs(q) <= ctx.pivmin) q = -ctx.pivmin;
        if (q < 0.0) ++cnt;
    }
    return cnt;
}

/// k-th smallest eigenvalue (0-based) by bisection on count_below.
inline double bisect_eigenvalue(const SturmContext& ctx, std::size_t k, double lo, double hi,
                                double tol) {
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_below(ctx, mid) <= k) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Forward-recurrence eigenvector guess at shift lam. Valid only when every
/// off-diagonal entry of the block is nonzero; returns empty on breakdown.
inline std::vector<double> recurrence_seed(const SturmContext& ctx, double lam) {
    const std::size_t n = ctx.d.size();
    std::vector<double> c(n);
    c[0] = 1.0;
    if (n > 1) {
        if (ctx.e[0] == 0.0) return {};
        c[1] = (lam - ctx.d[0]) / ctx.e[0];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (ctx.e[i] == 0.0) return {};
        c[i + 1] = ((lam - ctx.d[i]) * c[i] - ctx.e[i - 1] * c[i - 1]) / ctx.e[i];
        const double m = std::max(std::abs(c[i + 1]), std::abs(c[i]));
        if (m > 1e100) {
            const double f = 1.0 / m;
            for (std::size_t j = 0; j <= i + 1; ++j) c[j] *= f;
        }
    }
    for (double v : c)
        if (!std::isfinite(v)) return {};
    return c;
}

inline double tri_residual(const SturmContext& ctx, double lam, const std::vector<cdouble>& v,
                           std::vector<cdouble>& scratch) {
    const std::size_t n = ctx.d.size();
    scratch.assign(n, cdouble{});
    for (std::size_t i = 0; i < n; ++i) {
        cdouble acc = (ctx.d[i] - lam) * v[i];
        if (i > 0) acc += ctx.e[i - 1] * v[i - 1];
        if (i + 1 < n) acc += ctx.e[i] * v[i + 1];
        scratch[i] = acc;
    }
    const double nv = norm2(v);
    return nv > 0.0 ? norm2(scratch) / nv : std::numeric_limits<double>::infinity();
}

/// Eigenpairs of one unreduced block. Eigenvalues ascending; vectors unit
/// norm, orthogonalized across close clusters.
inline void solve_tridiagonal_block(const SturmContext& ctx, std::vector<double>& vals,
                                    std::vector<std::vector<cdouble>>& vecs) {
    const std::size_t n = ctx.d.size();
    vals.assign(n, 0.0);
    vecs.assign(n, {});
    if (n == 1) {
        vals[0] = ctx.d[0];
        vecs[0] = {cdouble{1.0, 0.0}};
        return;
    }
    const double nrm_scale = std::max(1.0, ctx.norm_inf);
    const double tol = 1e-13 * nrm_scale;
    double lo = ctx.lo - 2.0 * tol, hi = ctx.hi + 2.0 * tol;
    while (count_below(ctx, lo) != 0) lo -= std::max(1.0, std::abs(lo));
    while (count_below(ctx, hi) != n) hi += std::max(1.0, std::abs(hi));
    for (std::size_t k = 0; k < n; ++k) vals[k] = bisect_eigenvalue(ctx, k, lo, hi, tol);
    std::sort(vals.begin(), vals.end());

    const double eps = std::numeric_limits<double>::epsilon();
    const double ortho_gap = 1e-5 * nrm_scale;  // orthogonalize within clusters this tight
    const double sep = 2.0 * eps * nrm_scale;   // minimum shift separation inside a cluster
    const double accept = std::max(1e-12, 100.0 * eps * nrm_scale);

    std::size_t group_start = 0;
    double prev_shift = -std::numeric_limits<double>::infinity();
    std::vector<cdouble> scratch;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && vals[k] - vals[k - 1] > ortho_gap) group_start = k;
        double shift = vals[k];
        if (k > group_start && shift < prev_shift + sep) shift = prev_shift + sep;
        prev_shift = shift;

        std::vector<double> db(n);
        for (std::size_t i = 0; i < n; ++i) db[i] = ctx.d[i] - shift;
        const TridiagLU<double> lu(ctx.e, db, ctx.e);

        std::vector<cdouble> best;
        double best_res = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 5 && best_res > accept; ++attempt) {
            std::vector<cdouble> v;
            if (attempt == 0) {
                const std::vector<double> seed = recurrence_seed(ctx, vals[k]);
                if (!seed.empty()) {
                    v.resize(n);
                    for (std::size_t i = 0; i < n; ++i) v[i] = cdouble{seed[i], 0.0};
                }
            }
            if (v.empty()) v = seeded_unit_vector(n, 1315423911u * (k + 1) + attempt, false);
            double nv = norm2(v);
            if (nv == 0.0) continue;
            scale(v, cdouble{1.0 / nv, 0.0});
            for (int it = 0; it < 4; ++it) {
                lu.solve(v, ctx.pivmin);
                for (std::size_t j = group_start; j < k; ++j) {
                    const cdouble c = dotc(vecs[j], v);
                    axpy(-c, vecs[j], v);
                }
                nv = norm2(v);
                if (nv == 0.0 || !std::isfinite(nv)) break;
                scale(v, cdouble{1.0 / nv, 0.0});
                const double res = tri_residual(ctx, vals[k], v, scratch);
                if (res < best_res) {
                    best_res = res;
                    best = v;
                }
                if (best_res <= accept) break;
            }
        }
        if (best.empty()) {
            best = seeded_unit_vector(n, 2654435761u * (k + 1), false);
            const double nv = norm2(best);
            scale(best, cdouble{1.0 / nv, 0.0});
        }
        vecs[k] = std::move(best);
    }
}

}  // namespace detail

/// Eigenpairs of the real symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal. Eigenvalues by Sturm-sequence bisection to
/// absolute tolerance 1e-13 * max(1, norm); eigenvectors by inverse
/// iteration seeded from the three-term recurrence. The matrix splits at
/// exact zeros of the off-diagonal and each unreduced block is solved
/// independently.
inline Spectrum eigs_symmetric_tridiagonal(const std::vector<double>& diag,
                                           const std::vector<double>& offdiag) {
    const std::size_t n = diag.size();
    if (n == 0) throw std::invalid_argument("eigs_symmetric_tridiagonal: empty diagonal");
    if (offdiag.size() + 1 != n)
        throw std::invalid_argument("eigs_symmetric_tridiagonal: offdiag length must be n-1");
    for (double v : diag)
        if (!std::isfinite(v))
            throw std::invalid_argument("eigs_symmetric_tridiagonal: non-finite diagonal");
    for (double v : offdiag)
        if (!std::isfinite(v))
            throw std::invalid_argument("eigs_symmetric_tridiagonal: non-finite off-diagonal");

    Spectrum s;
    s.path = SolverPath::SymmetricTridiagonal;
    std::size_t b0 = 0;
    while (b0 < n) {
        std::size_t b1 = b0;
        while (b1 + 1 < n && offdiag[b1] != 0.0) ++b1;
        // block covers sites [b0, b1]
        std::vector<double> bd(diag.begin() + static_cast<long>(b0),
                               diag.begin() + static_cast<long>(b1) + 1);
        std::vector<double> be(offdiag.begin() + static_cast<long>(b0),
                               offdiag.begin() + static_cast<long>(b1));
        const detail::SturmContext ctx = detail::make_sturm_context(std::move(bd), std::move(be));
        std::vector<double> vals;
        std::vector<std::vector<cdouble>> vecs;
        detail::solve_tridiagonal_block(ctx, vals, vecs);
        for (std::size_t k = 0; k < vals.size(); ++k) {
            std::vector<cdouble> full(n, cdouble{});
            for (std::size_t i = 0; i < vecs[k].size(); ++i) full[b0 + i] = vecs[k][i];
            s.eigenvalues.push_back(cdouble{vals[k], 0.0});
            s.eigenvectors.push_back(std::move(full));
        }
        b0 = b1 + 1;
    }

    for (auto& v : s.eigenvectors) normalize_and_fix_phase(v);
    sort_spectrum(s);

    // residuals against a fresh matvec of (diag, offdiag), not the LU factors
    s.residuals.resize(n);
    double worst = 0.0;
    std::vector<cdouble> bad;
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        const auto& v = s.eigenvectors[k];
        const double lam = s.eigenvalues[k].real();
        for (std::size_t i = 0; i < n; ++i) {
            cdouble r = (diag[i] - lam) * v[i];
            if (i > 0) r += offdiag[i - 1] * v[i - 1];
            if (i + 1 < n) r += offdiag[i] * v[i + 1];
            acc += std::norm(r);
        }
        s.residuals[k] = std::sqrt(acc);
        if (s.residuals[k] > 1e-8) {
            worst = std::max(worst, s.residuals[k]);
            bad.push_back(s.eigenvalues[k]);
        }
    }
    if (!bad.empty())
        throw SolverError("inverse iteration failed to reach residual tolerance (worst " +
                              std::to_string(worst) + ")",
                          worst, bad);
    return s;
}

}  // namespace latspec
