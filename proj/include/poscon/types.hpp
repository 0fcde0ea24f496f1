#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace poscon {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel-level failures.
struct NonConvergence : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct SingularOperand : Error { using Error::Error; };

// Canonicalization rejections; each names the characterization condition
// the input violates.
struct NotAContraction : Error { using Error::Error; };
struct NotDiagonalizable : Error { using Error::Error; };
struct ComplexOrNegativeSpectrum : Error { using Error::Error; };
struct ResidualTooLarge : Error { using Error::Error; };

// Eigenbasis / factor construction failures.
struct DefectiveBlock : Error { using Error::Error; };
struct GammaNotPd : Error { using Error::Error; };
struct CertificationFailure : Error { using Error::Error; };
struct ConditionCViolated : Error { using Error::Error; };

// Closed-form criteria.
struct DomainError : Error { using Error::Error; };
struct NotTwoPointSpectrum : Error { using Error::Error; };

// I/O.
struct ParseError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

/// Numerical tolerances shared across the pipeline.  All eigenvalue-scale
/// thresholds are relative to max(1, matrix norm) unless noted.
struct ToleranceConfig {
    double hermitian_tol = 1e-10;  ///< allowed asymmetry before symmetrization errors out
    double eig_tol = 1e-10;        ///< eigendecomposition residual bar
    double psd_tol = 1e-10;        ///< negative-eigenvalue allowance when clipping to the PSD cone
    double sqrt_tol = 1e-8;        ///< principal square root round-trip bar
    double norm_tol = 1e-8;        ///< contraction slack: accept spectral norm <= 1 + norm_tol
    double tol_one = 1e-8;         ///< eigenvalues within tol_one of 1 (resp. 0) join the identity (resp. zero) block
    double cluster_tol = 1e-7;     ///< single-linkage eigenvalue clustering radius
    double rank_tol = 1e-9;        ///< singular values below rank_tol * ||A|| count as zero
    double canon_tol = 1e-7;       ///< zero-block verification / reconstruction bar in the canonical form
    double unitary_tol = 1e-9;     ///< ||W*W - I|| bar
    double basis_tol = 1e-9;       ///< eigenbasis residual bar
    double build_tol = 1e-9;       ///< assembled feasibility-problem consistency bar
    double pd_tol = 1e-12;         ///< positive-definiteness floor for inversions
    double boundary_tol = 1e-9;    ///< slack in the closed-form 2x2 comparison
    double decomp_tol = 1e-6;      ///< certified product residual bar
    double dil_tol = 1e-9;         ///< dilation identity bar
    double two_point_tol = 1e-8;   ///< quadratic annihilation test bar
};

}  // namespace poscon
