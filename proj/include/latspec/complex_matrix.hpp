#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace latspec {

using cdouble = std::complex<double>;

/// Zero-pattern tag carried alongside a dense matrix.
enum class MatrixStructure { Tridiagonal, TridiagonalPlusCorners, Dense };

inline const char* to_string(MatrixStructure s) {
    switch (s) {
        case MatrixStructure::Tridiagonal: return "tridiagonal";
        case MatrixStructure::TridiagonalPlusCorners: return "tridiagonal_plus_corners";
        case MatrixStructure::Dense: return "dense";
    }
    return "?";
}

inline std::optional<MatrixStructure> parse_structure(const std::string& s) {
    if (s == "tridiagonal") return MatrixStructure::Tridiagonal;
    if (s == "tridiagonal_plus_corners") return MatrixStructure::TridiagonalPlusCorners;
    if (s == "dense") return MatrixStructure::Dense;
    return std::nullopt;
}

/// Dense complex square matrix, row-major storage, with a structure tag.
struct ComplexMatrix {
    std::size_t dim = 0;
    std::vector<cdouble> entries;
    MatrixStructure structure = MatrixStructure::Dense;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t n, MatrixStructure s)
        : dim(n), entries(n * n, cdouble{0.0, 0.0}), structure(s) {}

    cdouble& operator()(std::size_t i, std::size_t j) { return entries[i * dim + j]; }
    const cdouble& operator()(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

inline std::vector<cdouble> matvec(const ComplexMatrix& m, const std::vector<cdouble>& v) {
    if (v.size() != m.dim) throw std::invalid_argument("matvec: size mismatch");
    std::vector<cdouble> out(m.dim, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < m.dim; ++i) {
        cdouble acc{0.0, 0.0};
        const cdouble* row = m.entries.data() + i * m.dim;
        for (std::size_t j = 0; j < m.dim; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

inline double max_abs(const ComplexMatrix& m) {
    double r = 0.0;
    for (const auto& z : m.entries) r = std::max(r, std::abs(z));
    return r;
}

/// Entrywise max |A - A^dagger|.
inline double hermiticity_defect(const ComplexMatrix& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i)
        for (std::size_t j = 0; j < m.dim; ++j)
            r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
    return r;
}

/// Entrywise max |A - A^T|.
inline double asymmetry_defect(const ComplexMatrix& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i)
        for (std::size_t j = i + 1; j < m.dim; ++j)
            r = std::max(r, std::abs(m(i, j) - m(j, i)));
    return r;
}

/// True when every entry outside the slots allowed by the tag is zero.
inline bool structure_consistent(const ComplexMatrix& m) {
    if (m.structure == MatrixStructure::Dense) return true;
    const std::size_t n = m.dim;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t band = (i > j) ? i - j : j - i;
            if (band <= 1) continue;
            const bool corner = (i == 0 && j == n - 1) || (i == n - 1 && j == 0);
            if (corner && m.structure == MatrixStructure::TridiagonalPlusCorners) continue;
            if (m(i, j) != cdouble{0.0, 0.0}) return false;
        }
    }
    return true;
}

}  // namespace latspec
