#pragma once

#include <poscon/hermitian.hpp>
#include <poscon/types.hpp>

#include <vector>

namespace poscon {

/// One cluster of eigenvalues strictly inside (0, 1).
struct InteriorGroup {
    double alpha = 0.0;       ///< cluster representative (mean of members)
    Index multiplicity = 0;
    double radius = 0.0;      ///< max distance of a member to alpha
};

/// Classification of a square matrix's spectrum into the {1}, {0} and
/// interior clusters, plus the feasibility flags the canonical form needs.
struct SpectrumReport {
    ComplexVector eigenvalues;                 ///< as computed, unordered
    Index ones_count = 0;                      ///< p
    Index zeros_count = 0;                     ///< q
    std::vector<InteriorGroup> interior_groups;  ///< descending alpha
    bool diagonalizable = false;
    bool contraction = false;
    bool real_unit_spectrum = false;  ///< all eigenvalues real within tol and in [-tol, 1 + tol]
    double spectral_norm_value = 0.0;

    Index interior_count() const;
};

SpectrumReport analyze_spectrum(const ComplexMatrix& a, const ToleranceConfig& tol = {});

/// Unitary canonical form W* A W = I_p (+) [[A11, A12], [0, 0_q]] with the
/// interior spectrum carried by the upper-triangular A11.
struct CanonicalForm {
    ComplexMatrix w;   ///< unitary change of basis, A = W * assemble() * W*
    Index p = 0;
    Index q = 0;       ///< trailing zero block size, q = n - p - m
    ComplexMatrix a11; ///< m x m, upper triangular, interior eigenvalues descending
    ComplexMatrix a12; ///< m x q
    SpectrumReport spectrum;

    Index m() const { return a11.rows(); }
    Index size() const { return p + m() + q; }

    /// I_p (+) [[A11, A12], [0, 0_q]].
    ComplexMatrix assemble() const;
    /// W * assemble() * W*.
    ComplexMatrix reconstruct() const;
};

/// Reduce a matrix to canonical form, or throw the rejection naming the
/// violated characterization condition: NotAContraction,
/// ComplexOrNegativeSpectrum, NotDiagonalizable, ResidualTooLarge.
CanonicalForm canonicalize(const ComplexMatrix& a, const ToleranceConfig& tol = {});

}  // namespace poscon
