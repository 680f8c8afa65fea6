#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "latspec/model.hpp"

namespace latspec {

/// Diagonal gauge that symmetrizes the hopping matrix. Applies only to open
/// chains with gamma_n = 0 and real hops with t_n t'_n > 0; the symmetrized
/// matrix is then real symmetric tridiagonal and the original spectrum is real.
struct GaugeCertificate {
    std::vector<double> q;      // Q_1..Q_N, Q_1 = 1, Q_{n+1} = Q_n sqrt(t'_n / t_n)
    std::vector<double> log_q;  // log Q_n; authoritative when q under/overflows
    ComplexMatrix symmetrized;  // D^-1 H D with D = diag(Q); empty if not applicable
    bool applicable = false;
    std::string reason;         // first failed condition when not applicable
    double max_asymmetry = 0.0; // entrywise max |S - S^T| of the symmetrized matrix
};

/// Build the gauge sequence Q_n and the symmetrized matrix, or report why the
/// construction does not apply. The applicability conditions are checked in
/// order: gain/loss, boundary, per-site hop reality and sign.
inline GaugeCertificate gauge_sequence(const LatticeModel& m) {
    require_valid(m);
    GaugeCertificate cert;
    for (double g : m.gains) {
        if (g != 0.0) {
            cert.reason = "gain/loss present";
            return cert;
        }
    }
    if (m.boundary == BoundaryCondition::Closed) {
        cert.reason = "closed chain";
        return cert;
    }
    const std::size_t n = m.n_sites;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const cdouble t = m.forward_hops[k];
        const cdouble tp = m.backward_hops[k];
        if (t.imag() != 0.0 || tp.imag() != 0.0) {
            cert.reason = "hops not real at n=" + std::to_string(k + 1);
            return cert;
        }
        if (!(t.real() * tp.real() > 0.0)) {
            cert.reason = "t_n t'_n <= 0 at n=" + std::to_string(k + 1);
            return cert;
        }
    }

    cert.applicable = true;
    cert.log_q.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double ratio = m.backward_hops[k].real() / m.forward_hops[k].real();
        cert.log_q[k + 1] = cert.log_q[k] + 0.5 * std::log(ratio);
    }
    cert.q.resize(n);
    for (std::size_t k = 0; k < n; ++k) cert.q[k] = std::exp(cert.log_q[k]);

    // S = D^-1 H D computed through log Q ratios; for valid gauges the
    // off-diagonals land on sign(t_n) sqrt(t_n t'_n) up to rounding.
    cert.symmetrized = ComplexMatrix(n, MatrixStructure::Tridiagonal);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double up = m.forward_hops[k].real() * std::exp(cert.log_q[k + 1] - cert.log_q[k]);
        const double dn = m.backward_hops[k].real() * std::exp(cert.log_q[k] - cert.log_q[k + 1]);
        cert.symmetrized(k, k + 1) = up;
        cert.symmetrized(k + 1, k) = dn;
    }
    cert.max_asymmetry = asymmetry_defect(cert.symmetrized);
    return cert;
}

/// True iff the diagonal-similarity argument certifies a real spectrum.
inline bool reality_certificate(const LatticeModel& m) { return gauge_sequence(m).applicable; }

}  // namespace latspec
