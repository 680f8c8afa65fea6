#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latspec/detail/linalg.hpp"
#include "latspec/model.hpp"

namespace latspec {

enum class SolverPath { SymmetricTridiagonal, GeneralComplex, ClosedForm };

inline const char* to_string(SolverPath p) {
    switch (p) {
        case SolverPath::SymmetricTridiagonal: return "symmetric_tridiagonal";
        case SolverPath::GeneralComplex: return "general_complex";
        case SolverPath::ClosedForm: return "closed_form";
    }
    return "?";
}

inline std::optional<SolverPath> parse_solver_path(const std::string& s) {
    if (s == "symmetric_tridiagonal") return SolverPath::SymmetricTridiagonal;
    if (s == "general_complex") return SolverPath::GeneralComplex;
    if (s == "closed_form") return SolverPath::ClosedForm;
    return std::nullopt;
}

/// Eigenvalues with paired normalized eigenvectors.
///
/// Contract: exactly N pairs; each eigenvector has unit Euclidean norm; the
/// first coefficient with modulus > 1e-8 * max_j |psi_j| is real positive;
/// pairs are sorted by (Re E, Im E), ties broken by lexicographic comparison
/// of the phase-fixed eigenvectors; residuals are ||H psi - E psi|| / ||psi||
/// measured against the realized Hamiltonian.
struct Spectrum {
    std::vector<cdouble> eigenvalues;
    std::vector<std::vector<cdouble>> eigenvectors;  // eigenvectors[k] has length N
    std::vector<double> residuals;
    SolverPath path = SolverPath::GeneralComplex;
};

/// Eigensolver non-convergence; carries the worst residual and the offending
/// eigenvalue estimates for diagnosis (expected very near an exceptional
/// point, where root clusters are ill-conditioned).
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, double worst, std::vector<cdouble> bad = {})
        : std::runtime_error(msg), worst_residual(worst), estimates(std::move(bad)) {}
    double worst_residual = 0.0;
    std::vector<cdouble> estimates;
};

/// Scale to unit norm and rotate so the first coefficient with modulus
/// > 1e-8 * max |psi_j| is real and positive.
inline void normalize_and_fix_phase(std::vector<cdouble>& v) {
    const double nn = detail::norm2(v);
    if (nn == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    detail::scale(v, cdouble{1.0 / nn, 0.0});
    double mx = 0.0;
    for (const auto& z : v) mx = std::max(mx, std::abs(z));
    for (auto& z : v) {
        const double a = std::abs(z);
        if (a > 1e-8 * mx) {
            detail::scale(v, std::conj(z) / a);
            z = cdouble{a, 0.0};  // pin the pivot exactly real
            break;
        }
    }
    // renormalize once more so rounding from the rotation cannot accumulate
    const double n2 = detail::norm2(v);
    if (n2 != 1.0 && n2 > 0.0) detail::scale(v, cdouble{1.0 / n2, 0.0});
}

namespace detail {

inline bool lex_less(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return a.size() < b.size();
}

}  // namespace detail

/// Deterministic ordering: (Re E, Im E), then eigenvector lexicographic.
inline void sort_spectrum(Spectrum& s) {
    std::vector<std::size_t> idx(s.eigenvalues.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        const cdouble a = s.eigenvalues[i], b = s.eigenvalues[j];
        if (a.real() != b.real()) return a.real() < b.real();
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return detail::lex_less(s.eigenvectors[i], s.eigenvectors[j]);
    });
    Spectrum out;
    out.path = s.path;
    for (std::size_t i : idx) {
        out.eigenvalues.push_back(s.eigenvalues[i]);
        out.eigenvectors.push_back(std::move(s.eigenvectors[i]));
        if (i < s.residuals.size()) out.residuals.push_back(s.residuals[i]);
    }
    s = std::move(out);
}

/// ||H psi - E psi|| / ||psi|| per pair, against the model's Hamiltonian.
inline std::vector<double> residuals_against(const LatticeModel& m, const Spectrum& s) {
    std::vector<double> out;
    out.reserve(s.eigenvalues.size());
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        std::vector<cdouble> r = apply_hamiltonian(m, s.eigenvectors[k]);
        detail::axpy(-s.eigenvalues[k], s.eigenvectors[k], r);
        const double nv = detail::norm2(s.eigenvectors[k]);
        out.push_back(nv > 0.0 ? detail::norm2(r) / nv : std::numeric_limits<double>::infinity());
    }
    return out;
}

/// Single-linkage grouping of eigenvalues at the given absolute radius.
/// Groups are returned as sorted index lists, in order of first member.
inline std::vector<std::vector<std::size_t>> cluster_indices(const std::vector<cdouble>& vals,
                                                             double radius) {
    const std::size_t n = vals.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(vals[i] - vals[j]) <= radius) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> where(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (where[root] < 0) {
            where[root] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(where[root])].push_back(i);
    }
    return groups;
}

/// Enforce the residual contract: <= tol_simple per pair, relaxed to
/// tol_multiple for members of degenerate clusters (radius cluster_radius).
inline void enforce_residual_contract(const Spectrum& s, double tol_simple, double tol_multiple,
                                      double cluster_radius) {
    const auto groups = cluster_indices(s.eigenvalues, cluster_radius);
    std::vector<double> bound(s.eigenvalues.size(), tol_simple);
    for (const auto& g : groups)
        if (g.size() >= 2)
            for (std::size_t i : g) bound[i] = tol_multiple;
    double worst = 0.0;
    std::vector<cdouble> bad;
    for (std::size_t k = 0; k < s.residuals.size(); ++k) {
        if (s.residuals[k] > bound[k]) {
            worst = std::max(worst, s.residuals[k]);
            bad.push_back(s.eigenvalues[k]);
        }
    }
    if (!bad.empty())
        throw SolverError("eigenpair residuals exceed tolerance (worst " + std::to_string(worst) +
                              ")",
                          worst, bad);
}

}  // namespace latspec
