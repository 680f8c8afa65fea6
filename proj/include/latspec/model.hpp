#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "latspec/complex_matrix.hpp"

namespace latspec {

enum class BoundaryCondition { Open, Closed };

inline const char* to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Open ? "open" : "closed";
}

/// One-dimensional chain of N sites with nearest-neighbour hops t_n (forward,
/// site n -> n+1 amplitude on the bra side), t'_n (backward) and imaginary
/// on-site terms i*gamma_n. Site indices are 1-based in every public contract;
/// storage is 0-based.
struct LatticeModel {
    std::size_t n_sites = 0;
    std::vector<cdouble> forward_hops;   // t_1..t_{N-1}, plus t_N when closed
    std::vector<cdouble> backward_hops;  // t'_1..t'_{N-1}, plus t'_N when closed
    std::vector<double> gains;           // gamma_1..gamma_N, real by type
    BoundaryCondition boundary = BoundaryCondition::Open;

    std::size_t expected_hop_count() const {
        return boundary == BoundaryCondition::Open ? n_sites - 1 : n_sites;
    }

    /// Constant-sequence convenience constructor.
    static LatticeModel uniform(std::size_t n, cdouble t, cdouble tp, double gamma = 0.0,
                                BoundaryCondition bc = BoundaryCondition::Open) {
        LatticeModel m;
        m.n_sites = n;
        m.boundary = bc;
        const std::size_t hops = (bc == BoundaryCondition::Open && n > 0) ? n - 1 : n;
        m.forward_hops.assign(hops, t);
        m.backward_hops.assign(hops, tp);
        m.gains.assign(n, gamma);
        return m;
    }
};

inline bool operator==(const LatticeModel& a, const LatticeModel& b) {
    return a.n_sites == b.n_sites && a.boundary == b.boundary &&
           a.forward_hops == b.forward_hops && a.backward_hops == b.backward_hops &&
           a.gains == b.gains;
}

/// Violations are data, not failures: an invalid model is representable and
/// reportable without throwing.
struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }

    std::string joined() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v;
        }
        return s;
    }
};

inline ValidationResult validate(const LatticeModel& m) {
    ValidationResult r;
    if (m.n_sites < 2) r.violations.push_back("n_sites must be >= 2");
    if (m.boundary == BoundaryCondition::Closed && m.n_sites < 3)
        r.violations.push_back("closed boundary requires n_sites >= 3");
    const std::size_t want = m.boundary == BoundaryCondition::Open
                                 ? (m.n_sites > 0 ? m.n_sites - 1 : 0)
                                 : m.n_sites;
    auto check_len = [&](const char* name, std::size_t got) {
        if (got != want)
            r.violations.push_back(std::string(name) + ": hop length " + std::to_string(got) +
                                   " != " +
                                   (m.boundary == BoundaryCondition::Open ? "N-1" : "N") + " = " +
                                   std::to_string(want));
    };
    check_len("forward_hops", m.forward_hops.size());
    check_len("backward_hops", m.backward_hops.size());
    if (m.gains.size() != m.n_sites)
        r.violations.push_back("gains: length " + std::to_string(m.gains.size()) +
                               " != N = " + std::to_string(m.n_sites));
    auto finite = [](cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    for (std::size_t i = 0; i < m.forward_hops.size(); ++i)
        if (!finite(m.forward_hops[i]))
            r.violations.push_back("forward_hops[" + std::to_string(i + 1) + "]: non-finite entry");
    for (std::size_t i = 0; i < m.backward_hops.size(); ++i)
        if (!finite(m.backward_hops[i]))
            r.violations.push_back("backward_hops[" + std::to_string(i + 1) + "]: non-finite entry");
    for (std::size_t i = 0; i < m.gains.size(); ++i)
        if (!std::isfinite(m.gains[i]))
            r.violations.push_back("gains[" + std::to_string(i + 1) + "]: non-finite entry");
    return r;
}

class ModelValidationError : public std::invalid_argument {
  public:
    explicit ModelValidationError(const ValidationResult& r)
        : std::invalid_argument("invalid model: " + r.joined()), violations(r.violations) {}
    std::vector<std::string> violations;
};

inline void require_valid(const LatticeModel& m) {
    const auto r = validate(m);
    if (!r.ok()) throw ModelValidationError(r);
}

/// Realize the model as a matrix: H[j][j] = i*gamma_j, H[j][j+1] = t_j,
/// H[j+1][j] = t'_j, plus H[N][1] = t_N and H[1][N] = t'_N when closed.
inline ComplexMatrix build_hamiltonian(const LatticeModel& m) {
    require_valid(m);
    const std::size_t n = m.n_sites;
    const bool closed = m.boundary == BoundaryCondition::Closed;
    ComplexMatrix h(n, closed ? MatrixStructure::TridiagonalPlusCorners
                              : MatrixStructure::Tridiagonal);
    for (std::size_t j = 0; j < n; ++j) h(j, j) = cdouble{0.0, m.gains[j]};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        h(j, j + 1) = m.forward_hops[j];
        h(j + 1, j) = m.backward_hops[j];
    }
    if (closed) {
        h(n - 1, 0) = m.forward_hops[n - 1];
        h(0, n - 1) = m.backward_hops[n - 1];
    }
    return h;
}

/// Structured H*v, identical to matvec(build_hamiltonian(m), v) but O(N).
inline std::vector<cdouble> apply_hamiltonian(const LatticeModel& m,
                                              const std::vector<cdouble>& v) {
    const std::size_t n = m.n_sites;
    if (v.size() != n) throw std::invalid_argument("apply_hamiltonian: size mismatch");
    std::vector<cdouble> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cdouble acc = cdouble{0.0, m.gains[j]} * v[j];
        if (j + 1 < n) acc += m.forward_hops[j] * v[j + 1];
        if (j > 0) acc += m.backward_hops[j - 1] * v[j - 1];
        out[j] = acc;
    }
    if (m.boundary == BoundaryCondition::Closed) {
        out[n - 1] += m.forward_hops[n - 1] * v[0];
        out[0] += m.backward_hops[n - 1] * v[n - 1];
    }
    return out;
}

/// True iff max |H - H^dagger| <= tol entrywise.
inline bool hermiticity_check(const LatticeModel& m, double tol) {
    require_valid(m);
    if (tol <= 0.0) throw std::invalid_argument("hermiticity_check: tol must be > 0");
    return hermiticity_defect(build_hamiltonian(m)) <= tol;
}

/// Exact Hermiticity: gamma_j == 0 and t'_j == conj(t_j) with no tolerance.
/// The solver dispatch uses this so the phase gauge below is exact.
inline bool exactly_hermitian(const LatticeModel& m) {
    for (double g : m.gains)
        if (g != 0.0) return false;
    for (std::size_t j = 0; j < m.forward_hops.size(); ++j)
        if (m.backward_hops[j] != std::conj(m.forward_hops[j])) return false;
    return true;
}

}  // namespace latspec
