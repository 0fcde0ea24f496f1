#pragma once

#include <poscon/canonical.hpp>
#include <poscon/feasibility.hpp>
#include <poscon/hermitian.hpp>
#include <poscon/types.hpp>

#include <optional>
#include <string>

namespace poscon {

/// Certified factorization A = P Q into positive semidefinite contractions,
/// expressed in the input's original basis.
struct Decomposition {
    HermitianMatrix p;
    HermitianMatrix q;
    double product_residual = 0.0;  ///< ||P Q - A||_F
    double p_norm = 0.0;
    double q_norm = 0.0;
    double p_min_eig = 0.0;
    double q_min_eig = 0.0;
};

/// Outcome of the closed-form criteria for a 2x2 upper-triangular block or
/// a two-point-spectrum matrix.
struct TwoByTwoVerdict {
    double a = 0.0;
    double b = 0.0;
    double p_abs = 0.0;  ///< effective coupling magnitude compared to the bound
    double bound = 0.0;  ///< |sqrt(a) - sqrt(b)| * sqrt((1-a)(1-b))
    bool feasible = false;
};

struct DecomposeConfig {
    ToleranceConfig tol;
    SolverConfig solver;
};

/// Assemble and certify the factors from a feasible block-diagonal gamma:
/// U = V gamma^{-1/2}, P = I_p (+) U U* (+) 0, Q = I_p (+) Z Z* with
/// Z = [(U*)^{-1} D^{1/2}; A12* (U*)^{-1} D^{-1/2}], both conjugated back by
/// W.  Throws GammaNotPd or CertificationFailure.
Decomposition construct_factors(const CanonicalForm& canon, const EigenBasis& basis,
                                const HermitianMatrix& gamma,
                                const DecomposeConfig& config = {});

/// Closed-form criterion for [[a, p], [0, b]]: feasible iff
/// |p| <= |sqrt(a) - sqrt(b)| sqrt((1-a)(1-b)) + boundary_tol.
TwoByTwoVerdict decide_2x2(double a, double b, Complex p, double boundary_tol = 1e-9);

/// Closed-form criterion for a matrix annihilated by (B - aI)(B - bI): the
/// effective coupling is sqrt(||B||^2 - (a^2 + b^2) + (ab / ||B||)^2).
TwoByTwoVerdict decide_two_point_spectrum(const ComplexMatrix& b_mat, double a, double b,
                                          const ToleranceConfig& tol = {});

enum class RejectionStage { Spectrum, CanonicalForm, Feasibility, Certification };

const char* to_string(RejectionStage stage);

struct RejectionReport {
    RejectionStage stage;
    std::string message;
};

/// Full pipeline result with the intermediate diagnostics the reports need.
struct DecomposeOutcome {
    std::optional<Decomposition> decomposition;
    std::optional<RejectionReport> rejection;
    std::optional<SpectrumReport> spectrum;
    std::optional<SolveOutcome> solve_outcome;

    bool success() const { return decomposition.has_value(); }
};

/// canonicalize -> build_eigenbasis -> build_problem -> solve ->
/// construct_factors, with certification against the original input as the
/// final arbiter.
DecomposeOutcome decompose(const ComplexMatrix& a, const DecomposeConfig& config = {});

}  // namespace poscon
