#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "latspec/model.hpp"

namespace latspec {

/// det(H - E*I) in scaled form: the determinant equals value * exp(log_scale)
/// and its E-derivative equals derivative * exp(log_scale). The shared scale
/// keeps Newton steps (value / derivative) exact while the raw determinant
/// over- or underflows for long chains.
struct CharPolyValue {
    cdouble value{0.0, 0.0};
    cdouble derivative{0.0, 0.0};
    double log_scale = 0.0;
};

namespace detail {

struct CharPolyProbe {
    cdouble value{0.0, 0.0};
    cdouble derivative{0.0, 0.0};
    /// Envelope of |determinant| accumulated by the same recurrence with
    /// absolute values; companion * exp(log_scale) bounds the magnitude a
    /// rounding-noise evaluation can reach, so |value| <= c*eps*companion
    /// means "zero to working precision".
    double companion = 0.0;
    double log_scale = 0.0;
};

/// Three-term determinant recurrence over the band-only block covering
/// 1-based sites [lo, hi]:  D_k = (i g_k - E) D_{k-1} - t_{k-1} t'_{k-1} D_{k-2}.
/// Derivative and absolute-value companion ride along under a common scale.
inline CharPolyProbe det_range(const LatticeModel& m, cdouble E, std::size_t lo, std::size_t hi) {
    CharPolyProbe out;
    cdouble dm1{1.0, 0.0}, dm2{0.0, 0.0};
    cdouble pm1{0.0, 0.0}, pm2{0.0, 0.0};
    double cm1 = 1.0, cm2 = 0.0;
    double log_scale = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const cdouble a = cdouble{0.0, m.gains[k - 1]} - E;
        cdouble hop2{0.0, 0.0};
        if (k > lo) hop2 = m.forward_hops[k - 2] * m.backward_hops[k - 2];
        const double abs_hop2 = std::abs(hop2);
        const cdouble d = a * dm1 - hop2 * dm2;
        const cdouble p = -dm1 + a * pm1 - hop2 * pm2;
        const double c = std::abs(a) * cm1 + abs_hop2 * cm2;
        dm2 = dm1; dm1 = d;
        pm2 = pm1; pm1 = p;
        cm2 = cm1; cm1 = c;
        const double mx = std::max({std::abs(dm1), std::abs(dm2), std::abs(pm1), std::abs(pm2),
                                    cm1, cm2});
        if (mx > 1e100 || (mx > 0.0 && mx < 1e-100)) {
            const double s = std::log(mx);
            const double f = std::exp(-s);
            dm1 *= f; dm2 *= f;
            pm1 *= f; pm2 *= f;
            cm1 *= f; cm2 *= f;
            log_scale += s;
        }
    }
    out.value = dm1;
    out.derivative = pm1;
    out.companion = std::max(cm1, std::abs(dm1));
    out.log_scale = log_scale;
    return out;
}

/// Full probe including the rounding-noise companion.
inline CharPolyProbe char_poly_probe(const LatticeModel& m, cdouble E) {
    const std::size_t n = m.n_sites;
    const CharPolyProbe full = det_range(m, E, 1, n);
    if (m.boundary == BoundaryCondition::Open) return full;

    // Ring closure: a periodic band adds the two corner entries t_N at (N,1)
    // and t'_N at (1,N). Cofactor expansion along row 1 and column N folds
    // them into three extra terms on top of the band determinant:
    //   det = T[1..N] - t_N t'_N T[2..N-1] - (-1)^N (t_N prod t_j + t'_N prod t'_j)
    // with both products running over the band hops j = 1..N-1.
    const CharPolyProbe inner = det_range(m, E, 2, n - 1);
    const cdouble alpha = m.forward_hops[n - 1];
    const cdouble beta = m.backward_hops[n - 1];

    cdouble phase_f{1.0, 0.0}, phase_b{1.0, 0.0};
    double log_f = 0.0, log_b = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double af = std::abs(m.forward_hops[j]);
        if (af == 0.0) log_f = -std::numeric_limits<double>::infinity();
        else { log_f += std::log(af); phase_f *= m.forward_hops[j] / af; }
        const double ab = std::abs(m.backward_hops[j]);
        if (ab == 0.0) log_b = -std::numeric_limits<double>::infinity();
        else { log_b += std::log(ab); phase_b *= m.backward_hops[j] / ab; }
    }
    const double abs_alpha = std::abs(alpha);
    const double abs_beta = std::abs(beta);
    const double log_corner_f = abs_alpha > 0.0
        ? log_f + std::log(abs_alpha) : -std::numeric_limits<double>::infinity();
    const double log_corner_b = abs_beta > 0.0
        ? log_b + std::log(abs_beta) : -std::numeric_limits<double>::infinity();

    double s = full.log_scale;
    if (inner.companion > 0.0 || std::abs(inner.value) > 0.0)
        s = std::max(s, inner.log_scale);
    if (std::isfinite(log_corner_f)) s = std::max(s, log_corner_f);
    if (std::isfinite(log_corner_b)) s = std::max(s, log_corner_b);

    const double wf_full = std::exp(full.log_scale - s);
    const double wf_inner = std::exp(inner.log_scale - s);
    const double wf_cf = std::exp(log_corner_f - s);
    const double wf_cb = std::exp(log_corner_b - s);

    const cdouble ab_cross = alpha * beta;
    const double ring_sign = (n % 2 == 0) ? -1.0 : 1.0;  // -(-1)^N

    CharPolyProbe out;
    out.log_scale = s;
    out.value = full.value * wf_full - ab_cross * inner.value * wf_inner;
    if (std::isfinite(log_corner_f)) out.value += ring_sign * phase_f * (alpha / abs_alpha) * wf_cf;
    if (std::isfinite(log_corner_b)) out.value += ring_sign * phase_b * (beta / abs_beta) * wf_cb;
    out.derivative = full.derivative * wf_full - ab_cross * inner.derivative * wf_inner;
    out.companion = full.companion * wf_full + std::abs(ab_cross) * inner.companion * wf_inner;
    if (std::isfinite(log_corner_f)) out.companion += wf_cf;
    if (std::isfinite(log_corner_b)) out.companion += wf_cb;
    out.companion = std::max(out.companion, std::abs(out.value));
    return out;
}

}  // namespace detail

/// Characteristic determinant det(H - E*I) with analytic E-derivative,
/// in overflow-safe scaled form. Works for both boundary conditions.
inline CharPolyValue char_poly(const LatticeModel& m, cdouble E) {
    require_valid(m);
    const detail::CharPolyProbe p = detail::char_poly_probe(m, E);
    return CharPolyValue{p.value, p.derivative, p.log_scale};
}

}  // namespace latspec
