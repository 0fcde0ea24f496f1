#pragma once

#include <poscon/canonical.hpp>
#include <poscon/factor.hpp>
#include <poscon/types.hpp>

#include <string>
#include <vector>

namespace poscon {

/// Data of the (n + 2m)-dimensional dilation of a canonical-form matrix that
/// is a product of two orthogonal projections.
struct DilationData {
    ComplexMatrix r;        ///< m x m, R = ((U11 U11*)^{-1} - I)^{1/2}
    ComplexMatrix c;        ///< m x m, C = A11^{-1} (U11 D U11* - A11 A11* - A12 A12*)^{1/2}
    ComplexMatrix t_tilde;  ///< (n + 2m) x (n + 2m)
};

/// Assemble the dilation from an invertible contraction U11 with
/// A11 U11 = U11 D and U11 D U11* >= A11 A11* + A12 A12*.  Throws
/// ConditionCViolated when either square-root argument is indefinite.
DilationData build_dilation(const CanonicalForm& canon, const ComplexMatrix& u11,
                            const RealVector& d, const ToleranceConfig& tol = {});

struct ProjectionProductCheck {
    bool verdict = false;
    ComplexMatrix witness;  ///< interior eigenvector matrix S when the criterion holds
    std::string diagnostics;
};

/// Decide whether T is a product of two orthogonal projections: the spectrum
/// must be real in [0, 1] and diagonalizable, the eigenvalue-1 eigenspace
/// must reduce T, and the interior eigenvector matrix S must satisfy
/// A1 A1* S = A1 S = S diag(a_j) with full column rank.
ProjectionProductCheck is_projection_product(const ComplexMatrix& t, double tol,
                                             const ToleranceConfig& config = {});

struct ValidationReport {
    bool p_projection = false;     ///< P~ is Hermitian idempotent
    bool q_projection = false;     ///< Q~ is Hermitian idempotent
    bool product_matches = false;  ///< leading block of P~ Q~ equals A
    double max_residual = 0.0;
    std::vector<std::string> violations;

    bool passed() const { return p_projection && q_projection && product_matches; }
};

/// Independent cross-check of a decomposition: embeds P and Q into 3n x 3n
/// orthogonal projections and verifies the product block reproduces A.
ValidationReport cross_validate(const ComplexMatrix& a, const Decomposition& dec, double tol);

}  // namespace poscon
