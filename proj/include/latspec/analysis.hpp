#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latspec/detail/linalg.hpp"
#include "latspec/eigs.hpp"
#include "latspec/spectrum.hpp"

namespace latspec {

/// |<u|v>|^2 / (<u|u> <v|v>). Invariant under rescaling of either argument.
/// Squared sums throughout, never sqrt: u == v then gives numerator and
/// denominator as the identical product, so self-fidelity is exactly 1.
inline double fidelity(const std::vector<cdouble>& u, const std::vector<cdouble>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("fidelity: length mismatch");
    double uu = 0.0, vv = 0.0;
    for (const auto& z : u) uu += std::norm(z);
    for (const auto& z : v) vv += std::norm(z);
    if (uu == 0.0 || vv == 0.0) throw std::invalid_argument("fidelity: zero vector");
    const double f = std::norm(detail::dotc(u, v)) / (uu * vv);
    return std::min(1.0, std::max(0.0, f));
}

/// The 3x3 symmetric matrix with zero diagonal and unit off-diagonals; its
/// spectrum is a two-fold -1 and a simple 2. The two-parameter eigenvector
/// family below shows that degenerate eigenvectors need not be orthogonal.
inline const std::array<std::array<double, 3>, 3>& demo_matrix() {
    static const std::array<std::array<double, 3>, 3> h{{{0.0, 1.0, 1.0},
                                                         {1.0, 0.0, 1.0},
                                                         {1.0, 1.0, 0.0}}};
    return h;
}

struct HermitianDemoCase {
    double xi = 0.0;
    std::array<double, 3> v1{};  // (1, 1, -2)
    std::array<double, 3> v2{};  // (1+xi, 1, -2-xi)
};

/// Builds the degenerate eigenvector pair of the demo matrix at parameter xi
/// and returns its fidelity. Both vectors are exact eigenvectors with
/// eigenvalue -1 for every xi; they are linearly independent iff xi != 0.
inline std::pair<HermitianDemoCase, double> hermitian_demo(double xi) {
    if (!std::isfinite(xi)) throw std::invalid_argument("hermitian_demo: non-finite xi");
    HermitianDemoCase c;
    c.xi = xi;
    c.v1 = {1.0, 1.0, -2.0};
    c.v2 = {1.0 + xi, 1.0, -2.0 - xi};
    const auto& h = demo_matrix();
    for (const auto& v : {c.v1, c.v2}) {
        double rr = 0.0, vv = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            double hv = 0.0;
            for (std::size_t j = 0; j < 3; ++j) hv += h[i][j] * v[j];
            rr += (hv + v[i]) * (hv + v[i]);  // eigenvalue -1: H v + v = 0
            vv += v[i] * v[i];
        }
        if (!(std::sqrt(rr) <= 1e-12 * std::sqrt(vv)))
            throw std::logic_error("hermitian_demo: residual check failed");
    }
    std::vector<cdouble> u(3), w(3);
    for (std::size_t i = 0; i < 3; ++i) {
        u[i] = cdouble{c.v1[i], 0.0};
        w[i] = cdouble{c.v2[i], 0.0};
    }
    return {c, fidelity(u, w)};
}

struct PairingReport {
    double tol = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> alternation_defects;  // parallel to pairs
    std::vector<double> pair_sum_mismatch;    // |E_k + E_k'| per pair
    std::optional<std::size_t> zero_mode_index;
    std::vector<std::size_t> unpaired;  // leftovers that are not a zero mode
    bool verdict = false;
};

namespace detail {

/// max_n |b_n - s (-1)^n a_n| with the unit phase s that minimizes the
/// Euclidean defect, i.e. the phase of the overlap of b with the alternated a.
inline double alternation_defect(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    std::vector<cdouble> alt(a.size());
    for (std::size_t n = 0; n < a.size(); ++n)
        alt[n] = (n % 2 == 0) ? a[n] : -a[n];  // site index n+1: (-1)^(n+1) pattern
    const cdouble ov = dotc(alt, b);
    const double mag = std::abs(ov);
    const cdouble s = mag > 0.0 ? ov / mag : cdouble{1.0, 0.0};
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) worst = std::max(worst, std::abs(b[n] - s * alt[n]));
    return worst;
}

}  // namespace detail

/// Match the spectrum into E <-> -E partners (largest |E| first, greedy
/// nearest |E_k + E_k'|), measure how well the partner eigenvector is the
/// site-alternated image of the original, and flag the odd-N zero mode.
/// An unpairable spectrum yields verdict false instead of throwing.
inline PairingReport pairing_check(const Spectrum& s, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("pairing_check: tol must be positive");
    const std::size_t n = s.eigenvalues.size();
    PairingReport rep;
    rep.tol = tol;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(s.eigenvalues[a]), mb = std::abs(s.eigenvalues[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });

    std::vector<char> matched(n, 0);
    for (std::size_t i : order) {
        if (matched[i]) continue;
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || matched[j]) continue;
            const double d = std::abs(s.eigenvalues[i] + s.eigenvalues[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best == n) break;  // odd leftover
        matched[i] = matched[best] = 1;
        rep.pairs.emplace_back(std::min(i, best), std::max(i, best));
    }
    std::sort(rep.pairs.begin(), rep.pairs.end());

    rep.pair_sum_mismatch.assign(rep.pairs.size(), 0.0);
    for (std::size_t p = 0; p < rep.pairs.size(); ++p) {
        const auto [i, j] = rep.pairs[p];
        rep.pair_sum_mismatch[p] = std::abs(s.eigenvalues[i] + s.eigenvalues[j]);
        rep.alternation_defects.push_back(
            detail::alternation_defect(s.eigenvectors[i], s.eigenvectors[j]));
    }

    bool ok = true;
    for (std::size_t k = 0; k < n; ++k) {
        if (matched[k]) continue;
        if (std::abs(s.eigenvalues[k]) <= tol && !rep.zero_mode_index) {
            rep.zero_mode_index = k;
        } else {
            rep.unpaired.push_back(k);
            ok = false;
        }
    }
    for (double d : rep.pair_sum_mismatch)
        if (d > tol) ok = false;
    for (double d : rep.alternation_defects)
        if (d > tol) ok = false;
    rep.verdict = ok;
    return rep;
}

/// Row k is the site-resolved density |psi_{nk}|^2 of eigenpair k.
/// Rows of a contract-normalized spectrum sum to 1.
inline std::vector<std::vector<double>> density_curves(const Spectrum& s) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.eigenvectors.size());
    for (const auto& v : s.eigenvectors) {
        std::vector<double> row(v.size());
        for (std::size_t n = 0; n < v.size(); ++n) row[n] = std::norm(v[n]);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct CurveCount {
    std::size_t n_distinct = 0;
    std::vector<std::vector<std::size_t>> groups;
    double tolerance = 0.0;
};

/// Partition density rows into visually identical curves: rows land in one
/// group when their pointwise difference stays within tol (transitively).
inline CurveCount count_distinct_curves(const std::vector<std::vector<double>>& densities,
                                        double tol = 1e-8) {
    const std::size_t m = densities.size();
    for (const auto& row : densities)
        if (row.size() != densities.front().size())
            throw std::invalid_argument("count_distinct_curves: ragged density matrix");
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double worst = 0.0;
            for (std::size_t n = 0; n < densities[i].size(); ++n)
                worst = std::max(worst, std::abs(densities[i][n] - densities[j][n]));
            if (worst <= tol) parent[find(i)] = find(j);
        }
    }
    CurveCount out;
    out.tolerance = tol;
    std::vector<long> where(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t root = find(i);
        if (where[root] < 0) {
            where[root] = static_cast<long>(out.groups.size());
            out.groups.emplace_back();
        }
        out.groups[static_cast<std::size_t>(where[root])].push_back(i);
    }
    out.n_distinct = out.groups.size();
    return out;
}

struct FidelityMatrix {
    std::vector<cdouble> labels;               // one representative eigenvalue per group
    std::vector<std::vector<double>> values;   // M x M, symmetric, unit diagonal
};

/// Pairwise fidelities over one representative eigenvector per distinct
/// eigenvalue (grouping radius 1e-9).
inline FidelityMatrix fidelity_matrix(const Spectrum& s) {
    const auto groups = cluster_indices(s.eigenvalues, 1e-9);
    FidelityMatrix fm;
    std::vector<std::size_t> reps;
    for (const auto& g : groups) {
        reps.push_back(g.front());
        fm.labels.push_back(s.eigenvalues[g.front()]);
    }
    const std::size_t m = reps.size();
    fm.values.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        fm.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double f = fidelity(s.eigenvectors[reps[i]], s.eigenvectors[reps[j]]);
            fm.values[i][j] = fm.values[j][i] = f;
        }
    }
    return fm;
}

struct EPReport {
    double cluster_radius = 0.0;
    std::vector<std::vector<std::size_t>> clusters;          // size >= 2 only
    std::vector<std::size_t> geometric_multiplicity;         // per cluster
    std::vector<std::vector<double>> cluster_singular_values;  // per cluster, descending
    double min_pairwise_fidelity = 0.0;
    double max_pairwise_fidelity = 0.0;
    bool ep_suspected = false;
};

/// Coalescence diagnostics: eigenvalues are clustered at radius
/// 1e-7 * max(1, spectral spread); each cluster's eigenvector block gets a
/// numerical rank from its singular values (threshold 1e-8 * largest). A
/// cluster whose rank falls short of its size signals an exceptional point
/// rather than an ordinary degeneracy. Fidelity extremes run over all
/// eigenpair pairs of the spectrum.
inline EPReport ep_diagnostics(const Spectrum& s) {
    const std::size_t n = s.eigenvalues.size();
    EPReport rep;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            spread = std::max(spread, std::abs(s.eigenvalues[i] - s.eigenvalues[j]));
    rep.cluster_radius = 1e-7 * std::max(1.0, spread);

    for (const auto& g : cluster_indices(s.eigenvalues, rep.cluster_radius)) {
        if (g.size() < 2) continue;
        std::vector<std::vector<cdouble>> block;
        for (std::size_t i : g) block.push_back(s.eigenvectors[i]);
        std::vector<double> sv = detail::singular_values(std::move(block));
        const std::size_t rank = detail::numerical_rank(sv, 1e-8);
        rep.clusters.push_back(g);
        rep.geometric_multiplicity.push_back(rank);
        rep.cluster_singular_values.push_back(std::move(sv));
        if (rank < g.size()) rep.ep_suspected = true;
    }

    if (n >= 2) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double f = fidelity(s.eigenvectors[i], s.eigenvectors[j]);
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
        }
        rep.min_pairwise_fidelity = lo;
        rep.max_pairwise_fidelity = hi;
    }
    return rep;
}

struct TrendPoint {
    bool ok = false;
    double min_fidelity = 0.0;
    double max_fidelity = 0.0;
    bool ep_suspected = false;
    std::string error;  // non-empty when the solver failed for this model
};

namespace detail {

inline TrendPoint trend_point_for(const LatticeModel& m) {
    TrendPoint p;
    try {
        const Spectrum s = eigs(m);
        const EPReport rep = ep_diagnostics(s);
        p.ok = true;
        p.min_fidelity = rep.min_pairwise_fidelity;
        p.max_fidelity = rep.max_pairwise_fidelity;
        p.ep_suspected = rep.ep_suspected;
    } catch (const std::exception& ex) {
        p.error = ex.what();
    }
    return p;
}

}  // namespace detail

/// Fidelity extremes and EP flag for each model of a family, in input order.
/// Solver failures are recorded per model; the sweep never aborts early.
/// Models are independent, so up to max_threads of them run concurrently;
/// results assemble in input order either way.
inline std::vector<TrendPoint> clustering_trend(const std::vector<LatticeModel>& family,
                                                std::size_t max_threads = 1) {
    if (family.empty()) return {};
    for (const auto& m : family)
        if (m.n_sites != family.front().n_sites || m.boundary != family.front().boundary)
            throw std::invalid_argument("clustering_trend: family must share size and boundary");
    std::vector<TrendPoint> out(family.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(max_threads, family.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < family.size(); ++i) out[i] = detail::trend_point_for(family[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < family.size(); i = next.fetch_add(1))
                out[i] = detail::trend_point_for(family[i]);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace latspec
