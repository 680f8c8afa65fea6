#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "latspec/char_poly.hpp"
#include "latspec/detail/linalg.hpp"
#include "latspec/model.hpp"
#include "latspec/spectrum.hpp"
#include "latspec/sturm.hpp"
#include "latspec/symmetrize.hpp"

namespace latspec {
namespace detail {

inline double infinity_norm(const LatticeModel& m) {
    const std::size_t n = m.n_sites;
    double best = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        double row = std::abs(m.gains[j - 1]);
        if (j > 1) row += std::abs(m.backward_hops[j - 2]);
        if (j < n) row += std::abs(m.forward_hops[j - 1]);
        if (m.boundary == BoundaryCondition::Closed) {
            if (j == 1) row += std::abs(m.backward_hops[n - 1]);
            if (j == n) row += std::abs(m.forward_hops[n - 1]);
        }
        best = std::max(best, row);
    }
    return best;
}

/// All n roots of the characteristic determinant by Aberth-Ehrlich
/// simultaneous iteration with Gauss-Seidel updates. A point whose
/// determinant value sinks below the rounding-noise envelope stops moving;
/// that is the best any pointwise evaluation can certify near a multiple
/// root. Throws SolverError when the sweep cap is hit.
inline std::vector<cdouble> aberth_roots(const LatticeModel& m) {
    const std::size_t n = m.n_sites;
    const double radius = 1.0 + infinity_norm(m);
    const double eps = std::numeric_limits<double>::epsilon();
    const double noise_factor = 8.0 * static_cast<double>(n) * eps;

    std::vector<cdouble> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double th = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.35) /
                          static_cast<double>(n);
        z[k] = radius * cdouble{std::cos(th), std::sin(th)};
    }

    const int max_sweeps = 400;
    bool converged = false;
    double worst_update = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool all_small = true;
        worst_update = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const CharPolyProbe probe = char_poly_probe(m, z[k]);
            const double pv = std::abs(probe.value);
            if (pv <= noise_factor * probe.companion) continue;  // at the noise floor
            if (probe.derivative == cdouble{}) {
                z[k] += cdouble{1e-8 * radius, 1e-8 * radius};
                all_small = false;
                continue;
            }
            const cdouble newton = probe.value / probe.derivative;
            cdouble repulse{};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == k) continue;
                cdouble d = z[k] - z[j];
                if (d == cdouble{}) d = cdouble{1e-14 * radius, 1e-14 * radius};
                repulse += cdouble{1.0, 0.0} / d;
            }
            const cdouble denom = cdouble{1.0, 0.0} - newton * repulse;
            cdouble w = (denom == cdouble{}) ? newton : newton / denom;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = newton;
            z[k] -= w;
            const double rel = std::abs(w) / std::max(1.0, std::abs(z[k]));
            worst_update = std::max(worst_update, rel);
            if (rel > 1e-13) all_small = false;
        }
        if (all_small) converged = true;
    }
    if (!converged)
        throw SolverError("root iteration did not settle after 400 sweeps", worst_update, z);

    // Newton polish; multiple roots are left to the cluster stage below.
    for (std::size_t k = 0; k < n; ++k) {
        for (int step = 0; step < 3; ++step) {
            const CharPolyProbe probe = char_poly_probe(m, z[k]);
            if (std::abs(probe.value) <= noise_factor * probe.companion) break;
            if (probe.derivative == cdouble{}) break;
            const cdouble w = probe.value / probe.derivative;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
            z[k] -= w;
            if (std::abs(w) <= eps * std::max(1.0, std::abs(z[k]))) break;
        }
    }
    return z;
}

/// Secant iteration driving the analytic derivative of the determinant to
/// zero; used to pin a two-fold root far below the accuracy of the split
/// estimates themselves.
inline cdouble refine_double_root(const LatticeModel& m, cdouble a, cdouble b) {
    const cdouble start_mean = 0.5 * (a + b);
    const double reach = 10.0 * (std::abs(a - b) + 1e-7 * std::max(1.0, std::abs(start_mean)));
    if (a == b) {
        const double h = 1e-9 * std::max(1.0, std::abs(a));
        b = a + cdouble{h, 0.0};
    }
    cdouble fa = char_poly_probe(m, a).derivative;
    cdouble fb = char_poly_probe(m, b).derivative;
    for (int it = 0; it < 24; ++it) {
        const cdouble df = fb - fa;
        if (df == cdouble{}) break;
        const cdouble next = b - fb * (b - a) / df;
        if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
        a = b; fa = fb;
        b = next; fb = char_poly_probe(m, b).derivative;
        if (std::abs(b - a) <= 1e-16 * std::max(1.0, std::abs(b))) break;
    }
    if (std::abs(b - start_mean) > reach) return start_mean;  // wandered off the cluster
    return b;
}

/// Multiplicity-aware Newton from the cluster mean; quadratic at an m-fold
/// root while the evaluation noise allows.
inline cdouble refine_multiple_root(const LatticeModel& m, cdouble z, std::size_t mult) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double noise_factor = 8.0 * static_cast<double>(m.n_sites) * eps;
    for (int step = 0; step < 8; ++step) {
        const CharPolyProbe probe = char_poly_probe(m, z);
        if (std::abs(probe.value) <= noise_factor * probe.companion) break;
        if (probe.derivative == cdouble{}) break;
        const cdouble w = static_cast<double>(mult) * probe.value / probe.derivative;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
        z -= w;
        if (std::abs(w) <= eps * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

/// Group root estimates whose Newton inclusion disks overlap (or that sit
/// within the declared multiplicity radius), then collapse each group to a
/// single refined value. The mean of a noise-split m-cluster already tracks
/// the true m-fold root far better than any member; for double roots the
/// derivative zero pins it to near machine precision.
inline std::vector<cdouble> collapse_root_clusters(const LatticeModel& m,
                                                   std::vector<cdouble> z) {
    const std::size_t n = z.size();
    std::vector<double> radius(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const CharPolyProbe probe = char_poly_probe(m, z[k]);
        if (probe.derivative == cdouble{})
            radius[k] = 1e-7 * std::max(1.0, std::abs(z[k]));
        else
            radius[k] = static_cast<double>(n) * std::abs(probe.value / probe.derivative);
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(z[i] - z[j]);
            if (d <= 3.0 * (radius[i] + radius[j]) || d <= 1e-9) parent[find(i)] = find(j);
        }
    }
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (const auto& g : groups) {
        if (g.size() < 2) continue;
        cdouble mean{};
        for (std::size_t i : g) mean += z[i];
        mean /= static_cast<double>(g.size());
        cdouble center;
        if (g.size() == 2)
            center = refine_double_root(m, z[g[0]], z[g[1]]);
        else
            center = refine_multiple_root(m, mean, g.size());
        for (std::size_t i : g) z[i] = center;
    }
    return z;
}

/// Eigenvector from the three-term recurrence with open ends: fix the first
/// coefficient, march forward, and let the residual check decide whether the
/// result is usable. Breaks (empty return) on a vanishing forward hop.
inline std::vector<cdouble> open_recurrence_vector(const LatticeModel& m, cdouble e) {
    const std::size_t n = m.n_sites;
    std::vector<cdouble> psi(n);
    psi[0] = cdouble{1.0, 0.0};
    for (std::size_t k = 1; k < n; ++k) {
        const cdouble t = m.forward_hops[k - 1];
        if (t == cdouble{}) return {};
        cdouble acc = (e - cdouble{0.0, m.gains[k - 1]}) * psi[k - 1];
        if (k >= 2) acc -= m.backward_hops[k - 2] * psi[k - 2];
        psi[k] = acc / t;
        double mx = 0.0;
        for (std::size_t j = 0; j <= k; ++j) mx = std::max(mx, std::abs(psi[j]));
        if (mx > 1e120) {
            const double f = 1.0 / mx;
            for (std::size_t j = 0; j <= k; ++j) psi[j] *= f;
        }
    }
    for (const auto& c : psi)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return {};
    return psi;
}

inline double model_residual(const LatticeModel& m, cdouble e, const std::vector<cdouble>& v) {
    std::vector<cdouble> r = apply_hamiltonian(m, v);
    axpy(-e, v, r);
    const double nv = norm2(v);
    return nv > 0.0 ? norm2(r) / nv : std::numeric_limits<double>::infinity();
}

/// Shifted inverse iteration on the full Hamiltonian. `ortho` lists already
/// accepted vectors of the same root cluster to project away; pass empty for
/// the leading vector.
class ShiftedSolver {
  public:
    ShiftedSolver(const LatticeModel& m, cdouble shift) : model_(m) {
        const std::size_t n = m.n_sites;
        if (m.boundary == BoundaryCondition::Open) {
            std::vector<cdouble> sub(m.backward_hops.begin(), m.backward_hops.end());
            std::vector<cdouble> super(m.forward_hops.begin(), m.forward_hops.end());
            std::vector<cdouble> diag(n);
            for (std::size_t j = 0; j < n; ++j) diag[j] = cdouble{0.0, m.gains[j]} - shift;
            tri_ = std::make_unique<TridiagLU<cdouble>>(std::move(sub), std::move(diag),
                                                        std::move(super));
        } else {
            ComplexMatrix h = build_hamiltonian(m);
            for (std::size_t j = 0; j < n; ++j) h(j, j) -= shift;
            dense_ = std::make_unique<DenseLU>(h);
        }
        pivot_floor_ = 1e-30 * std::max(1.0, infinity_norm(m));
    }

    void apply_inverse(std::vector<cdouble>& v) const {
        if (tri_) tri_->solve(v, pivot_floor_);
        else dense_->solve(v, pivot_floor_);
    }

    std::vector<cdouble> iterate(cdouble e, const std::vector<std::vector<cdouble>>& ortho,
                                 double accept_tol, double& out_residual) const {
        const std::size_t n = model_.n_sites;
        std::vector<cdouble> best;
        double best_res = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 4 && best_res > accept_tol; ++attempt) {
            std::vector<cdouble> v = seeded_unit_vector(
                n, 0x51ed2701u + 977u * attempt + 31u * static_cast<unsigned>(ortho.size()));
            for (int it = 0; it < 5; ++it) {
                apply_inverse(v);
                for (const auto& u : ortho) {
                    const cdouble c = dotc(u, v);
                    axpy(-c, u, v);
                }
                const double nv = norm2(v);
                if (nv == 0.0 || !std::isfinite(nv)) break;
                scale(v, cdouble{1.0 / nv, 0.0});
                const double res = model_residual(model_, e, v);
                if (res < best_res) {
                    best_res = res;
                    best = v;
                }
                if (best_res <= accept_tol) break;
            }
        }
        out_residual = best_res;
        return best;
    }

  private:
    const LatticeModel& model_;
    std::unique_ptr<TridiagLU<cdouble>> tri_;
    std::unique_ptr<DenseLU> dense_;
    double pivot_floor_ = 0.0;
};

}  // namespace detail

/// Full complex spectrum by simultaneous root refinement of the
/// characteristic determinant plus per-root eigenvector solves. Handles both
/// boundary conditions, arbitrary complex hops, and gain/loss. Root estimates
/// closer than 1e-9 (or with overlapping inclusion disks) are declared one
/// multiple root; the residual bound is relaxed to 1e-7 there.
inline Spectrum eigs_general(const LatticeModel& m) {
    require_valid(m);
    const std::size_t n = m.n_sites;
    const double eps = std::numeric_limits<double>::epsilon();
    const double scale_norm = std::max(1.0, detail::infinity_norm(m));
    const double accept_simple = std::max(1e-12, 100.0 * eps * scale_norm);
    const double accept_extra = std::max(1e-11, 1e5 * eps * scale_norm);

    std::vector<cdouble> roots = detail::collapse_root_clusters(m, detail::aberth_roots(m));

    // group identical values (cluster collapse made multiple roots bit-equal)
    std::vector<std::vector<std::size_t>> groups = cluster_indices(roots, 1e-9);

    Spectrum s;
    s.path = SolverPath::GeneralComplex;
    s.eigenvalues.assign(n, cdouble{});
    s.eigenvectors.assign(n, {});

    for (const auto& g : groups) {
        const cdouble e = roots[g[0]];
        std::vector<std::vector<cdouble>> accepted;

        // cheap route first: open-chain forward recurrence for a simple root
        if (g.size() == 1 && m.boundary == BoundaryCondition::Open) {
            std::vector<cdouble> psi = detail::open_recurrence_vector(m, e);
            if (!psi.empty()) {
                const double nv = detail::norm2(psi);
                if (nv > 0.0 && std::isfinite(nv)) {
                    detail::scale(psi, cdouble{1.0 / nv, 0.0});
                    if (detail::model_residual(m, e, psi) <= accept_simple)
                        accepted.push_back(std::move(psi));
                }
            }
        }

        if (accepted.empty() || accepted.size() < g.size()) {
            const detail::ShiftedSolver solver(m, e);
            while (accepted.size() < g.size()) {
                double res = 0.0;
                const double tol = accepted.empty() ? accept_simple : accept_extra;
                std::vector<cdouble> v = solver.iterate(e, accepted, tol, res);
                if (!accepted.empty() && (v.empty() || res > tol)) {
                    // defective direction: geometric multiplicity exhausted,
                    // repeat the leading vector so the count stays honest
                    accepted.push_back(accepted.front());
                    continue;
                }
                if (v.empty())
                    throw SolverError("inverse iteration produced no usable vector near E = " +
                                          std::to_string(e.real()) + "+" +
                                          std::to_string(e.imag()) + "i",
                                      res, {e});
                accepted.push_back(std::move(v));
            }
        }

        for (std::size_t i = 0; i < g.size(); ++i) {
            s.eigenvalues[g[i]] = e;
            s.eigenvectors[g[i]] = accepted[i];
        }
    }

    for (auto& v : s.eigenvectors) normalize_and_fix_phase(v);
    sort_spectrum(s);
    s.residuals = residuals_against(m, s);
    enforce_residual_contract(s, 1e-8, 1e-7, 1e-9);
    return s;
}

/// Closed-form spectrum for an open uniform chain with t*tp > 0:
/// E_k = 2 sqrt(t tp) cos(k pi / (N+1)), components (sqrt(tp/t))^n sin(n k pi/(N+1)).
/// For odd N the middle eigenvalue is exactly zero.
inline Spectrum exact_constant_hopping(std::size_t n_sites, double t, double tp) {
    if (!(t * tp > 0.0))
        throw std::invalid_argument("exact_constant_hopping requires t * tp > 0");
    const LatticeModel m = LatticeModel::uniform(n_sites, cdouble{t, 0.0}, cdouble{tp, 0.0});
    require_valid(m);
    const std::size_t n = n_sites;
    const double band = 2.0 * std::sqrt(t * tp);
    const double log_ratio = 0.5 * (std::log(std::abs(tp)) - std::log(std::abs(t)));

    Spectrum s;
    s.path = SolverPath::ClosedForm;
    for (std::size_t k = 1; k <= n; ++k) {
        const double arg = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n + 1);
        double e = band * std::cos(arg);
        if (n % 2 == 1 && 2 * k == n + 1) e = 0.0;
        std::vector<double> log_mag(n, -std::numeric_limits<double>::infinity());
        std::vector<double> sign(n, 0.0);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= n; ++j) {
            const double sv = std::sin(std::numbers::pi * static_cast<double>(j * k) /
                                       static_cast<double>(n + 1));
            if (sv == 0.0) continue;
            log_mag[j - 1] = static_cast<double>(j) * log_ratio + std::log(std::abs(sv));
            sign[j - 1] = sv > 0.0 ? 1.0 : -1.0;
            top = std::max(top, log_mag[j - 1]);
        }
        std::vector<cdouble> psi(n);
        for (std::size_t j = 0; j < n; ++j)
            psi[j] = sign[j] == 0.0 ? cdouble{}
                                    : cdouble{sign[j] * std::exp(log_mag[j] - top), 0.0};
        s.eigenvalues.push_back(cdouble{e, 0.0});
        s.eigenvectors.push_back(std::move(psi));
    }
    for (auto& v : s.eigenvectors) normalize_and_fix_phase(v);
    sort_spectrum(s);
    s.residuals = residuals_against(m, s);
    enforce_residual_contract(s, 1e-8, 1e-7, 1e-9);
    return s;
}

/// Route to the cheapest solver that the model admits:
///  1. gauge certificate -> real symmetric tridiagonal, eigenvectors
///     transported back through the diagonal similarity;
///  2. exactly Hermitian open chain -> unit-modulus phase gauge, same
///     tridiagonal core;
///  3. everything else -> general complex path.
inline Spectrum eigs(const LatticeModel& m) {
    require_valid(m);
    const std::size_t n = m.n_sites;

    const GaugeCertificate cert = gauge_sequence(m);
    if (cert.applicable) {
        std::vector<double> diag(n, 0.0);
        std::vector<double> off(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double prod = m.forward_hops[k].real() * m.backward_hops[k].real();
            off[k] = std::copysign(std::sqrt(prod), m.forward_hops[k].real());
        }
        Spectrum s = eigs_symmetric_tridiagonal(diag, off);
        for (auto& v : s.eigenvectors) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (v[j] != cdouble{})
                    top = std::max(top, cert.log_q[j] + std::log(std::abs(v[j])));
            for (std::size_t j = 0; j < n; ++j)
                v[j] *= std::exp(cert.log_q[j] - top);
            normalize_and_fix_phase(v);
        }
        sort_spectrum(s);
        s.residuals = residuals_against(m, s);
        enforce_residual_contract(s, 1e-8, 1e-7, 1e-9);
        return s;
    }

    if (m.boundary == BoundaryCondition::Open && exactly_hermitian(m)) {
        std::vector<double> diag(n, 0.0);
        std::vector<double> off(n - 1);
        std::vector<cdouble> phase(n, cdouble{1.0, 0.0});
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double mag = std::abs(m.forward_hops[k]);
            off[k] = mag;
            phase[k + 1] = mag > 0.0 ? phase[k] * (std::conj(m.forward_hops[k]) / mag)
                                     : phase[k];
        }
        Spectrum s = eigs_symmetric_tridiagonal(diag, off);
        for (auto& v : s.eigenvectors) {
            for (std::size_t j = 0; j < n; ++j) v[j] *= phase[j];
            normalize_and_fix_phase(v);
        }
        sort_spectrum(s);
        s.residuals = residuals_against(m, s);
        enforce_residual_contract(s, 1e-8, 1e-7, 1e-9);
        return s;
    }

    return eigs_general(m);
}

}  // namespace latspec
