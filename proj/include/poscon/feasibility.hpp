#pragma once

#include <poscon/canonical.hpp>
#include <poscon/hermitian.hpp>
#include <poscon/types.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace poscon {

/// Sizes of the diagonal blocks that partition an m x m matrix.
struct BlockStructure {
    std::vector<Index> sizes;

    Index total() const;
    std::vector<Index> offsets() const;
};

/// Columnwise eigenbasis of A11: within each block j the columns form an
/// orthonormal basis of the alpha_j eigenspace, and A11 V = V diag(d).
struct EigenBasis {
    ComplexMatrix v;          ///< m x m, invertible
    RealVector d;             ///< eigenvalues repeated per multiplicity
    BlockStructure blocks;
    double min_singular_value = 0.0;  ///< invertibility diagnostic for V
};

/// Null-space bases of (A11 - alpha_j I), one block per interior group in
/// the order the spectrum lists them.  Throws DefectiveBlock when a null
/// space does not have the expected dimension.
EigenBasis build_eigenbasis(const ComplexMatrix& a11, const SpectrumReport& spectrum,
                            const ToleranceConfig& tol = {});

/// Rotate each block of the basis (unitarily, within its eigenspace) to the
/// closest match of a reference matrix.  Used to reproduce published runs
/// that fix a particular eigenvector choice.
EigenBasis align_to_reference(const EigenBasis& basis, const ComplexMatrix& v_ref);

/// The sandwich problem: find block-diagonal PSD gamma with Y <= gamma <= X,
/// where X = D^{1/2} V* (A11 A11* + A12 A12*)^{-1} V D^{1/2} and Y = V* V.
struct FeasibilityProblem {
    HermitianMatrix x;
    HermitianMatrix y;
    BlockStructure blocks;
};

FeasibilityProblem build_problem(const EigenBasis& basis, const ComplexMatrix& a11,
                                 const ComplexMatrix& a12, const ToleranceConfig& tol = {});

/// Projection onto the block-diagonal PSD matrices: keeps the diagonal
/// blocks' PSD parts, zeroes everything off-block.
HermitianMatrix project_block_diagonal_psd(const HermitianMatrix& g,
                                           const BlockStructure& blocks);

/// Projection onto {G : G <= upper}: upper - (upper - G)^+.
HermitianMatrix project_below(const HermitianMatrix& g, const HermitianMatrix& upper);

/// Projection onto {G : G >= lower}: (G - lower)^+ + lower.
HermitianMatrix project_above(const HermitianMatrix& g, const HermitianMatrix& lower);

/// Blockwise average of the diagonal blocks of X and Y.
HermitianMatrix initial_gamma(const FeasibilityProblem& problem);

/// max(0, -lambda_min(G - Y)) + max(0, -lambda_min(X - G)).
double feasibility_error(const HermitianMatrix& g, const FeasibilityProblem& problem);

struct SolverConfig {
    std::size_t max_iter = 100000;
    double feas_tol = 1e-12;
    std::size_t stall_window = 500;
    double stall_rel_change = 1e-6;
};

enum class SolveStatus { Feasible, Stalled, MaxIterReached };

struct ErrorTracePoint {
    std::size_t iteration;
    double error;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::MaxIterReached;
    std::optional<HermitianMatrix> gamma;  ///< present when status == Feasible
    double residual = 0.0;                 ///< final feasibility error
    std::size_t iterations = 0;
    std::vector<ErrorTracePoint> error_history;  ///< every iteration up to 1e4, then every 10th
};

/// Optional per-iteration observer: (iteration, block-diagonal iterate, error).
using SolveObserver = std::function<void(std::size_t, const HermitianMatrix&, double)>;

/// Alternating projections on the cycle below-X / block-PSD / above-Y /
/// block-PSD, starting from the blockwise average.  One iteration is one
/// half-cycle: a single X- or Y-side projection followed by the
/// block-diagonal projection, with the error measured on the block-diagonal
/// iterate.  Stops Feasible at error <= feas_tol; Stalled when the windowed
/// minimum of the error stops improving by stall_rel_change (relative) per
/// stall_window iterations while still above feas_tol.
SolveOutcome solve(const FeasibilityProblem& problem, const SolverConfig& config = {},
                   const SolveObserver& observer = nullptr);

}  // namespace poscon
