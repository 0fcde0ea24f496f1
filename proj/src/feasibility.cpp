#include <poscon/feasibility.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace poscon {

Index BlockStructure::total() const {
    return std::accumulate(sizes.begin(), sizes.end(), Index(0));
}

std::vector<Index> BlockStructure::offsets() const {
    std::vector<Index> offs(sizes.size());
    Index acc = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        offs[j] = acc;
        acc += sizes[j];
    }
    return offs;
}

EigenBasis build_eigenbasis(const ComplexMatrix& a11, const SpectrumReport& spectrum,
                            const ToleranceConfig& tol) {
    const Index m = a11.rows();
    if (a11.cols() != m) {
        throw DimensionMismatch("build_eigenbasis needs a square A11");
    }
    if (spectrum.interior_count() != m) {
        throw DefectiveBlock("spectrum lists " + std::to_string(spectrum.interior_count()) +
                             " interior eigenvalues for an A11 of size " + std::to_string(m));
    }

    EigenBasis basis;
    basis.v = ComplexMatrix(m, m);
    basis.d = RealVector(m);
    const double scale = std::max(1.0, spectral_norm(a11));

    Index offset = 0;
    for (const auto& group : spectrum.interior_groups) {
        ComplexMatrix shifted = a11 - group.alpha * ComplexMatrix::Identity(m, m);
        Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
        // Anything the cluster radius can explain counts as a null direction.
        const double cutoff = std::max(tol.rank_tol * scale, 4.0 * group.radius);
        Index null_dim = 0;
        for (Index i = 0; i < m; ++i) {
            if (svd.singularValues()(i) <= cutoff) ++null_dim;
        }
        if (null_dim != group.multiplicity) {
            throw DefectiveBlock("eigenspace of alpha = " + std::to_string(group.alpha) +
                                 " has dimension " + std::to_string(null_dim) +
                                 ", expected " + std::to_string(group.multiplicity));
        }
        // Rightmost singular vectors span the numerical null space and are
        // orthonormal by construction.
        basis.v.middleCols(offset, group.multiplicity) =
            svd.matrixV().rightCols(group.multiplicity);
        basis.d.segment(offset, group.multiplicity).setConstant(group.alpha);
        basis.blocks.sizes.push_back(group.multiplicity);
        offset += group.multiplicity;
    }

    Eigen::JacobiSVD<ComplexMatrix> vsvd(basis.v);
    basis.min_singular_value = m == 0 ? 0.0 : vsvd.singularValues()(m - 1);
    return basis;
}

EigenBasis align_to_reference(const EigenBasis& basis, const ComplexMatrix& v_ref) {
    if (v_ref.rows() != basis.v.rows() || v_ref.cols() != basis.v.cols()) {
        throw DimensionMismatch("reference basis has the wrong shape");
    }
    EigenBasis out = basis;
    const auto offsets = basis.blocks.offsets();
    for (std::size_t j = 0; j < basis.blocks.sizes.size(); ++j) {
        const Index s = basis.blocks.sizes[j];
        const ComplexMatrix overlap = basis.v.middleCols(offsets[j], s).adjoint() *
                                      v_ref.middleCols(offsets[j], s);
        // Orthogonal Procrustes within the eigenspace: the closest unitary to
        // the overlap is the product of its SVD factors.
        Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const ComplexMatrix rot = svd.matrixU() * svd.matrixV().adjoint();
        out.v.middleCols(offsets[j], s) = basis.v.middleCols(offsets[j], s) * rot;
    }
    return out;
}

FeasibilityProblem build_problem(const EigenBasis& basis, const ComplexMatrix& a11,
                                 const ComplexMatrix& a12, const ToleranceConfig& tol) {
    const Index m = a11.rows();
    if (basis.v.rows() != m || a12.rows() != m) {
        throw DimensionMismatch("basis, A11 and A12 sizes do not agree");
    }
    ComplexMatrix gram = a11 * a11.adjoint() + a12 * a12.adjoint();
    HermitianMatrix inv = psd_inverse(HermitianMatrix(gram, tol.hermitian_tol), tol.pd_tol);
    RealVector droot = basis.d.cwiseSqrt();
    ComplexMatrix x = droot.asDiagonal() * basis.v.adjoint() * inv.matrix() * basis.v *
                      droot.asDiagonal();
    ComplexMatrix y = basis.v.adjoint() * basis.v;
    return FeasibilityProblem{HermitianMatrix(std::move(x), tol.hermitian_tol),
                              HermitianMatrix(std::move(y), tol.hermitian_tol),
                              basis.blocks};
}

HermitianMatrix project_block_diagonal_psd(const HermitianMatrix& g,
                                           const BlockStructure& blocks) {
    const Index m = g.size();
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    const auto offsets = blocks.offsets();
    for (std::size_t j = 0; j < blocks.sizes.size(); ++j) {
        const Index s = blocks.sizes[j];
        HermitianMatrix block(g.matrix().block(offsets[j], offsets[j], s, s));
        out.block(offsets[j], offsets[j], s, s) = psd_part(block).matrix();
    }
    return HermitianMatrix(std::move(out));
}

HermitianMatrix project_below(const HermitianMatrix& g, const HermitianMatrix& upper) {
    return upper - psd_part(upper - g);
}

HermitianMatrix project_above(const HermitianMatrix& g, const HermitianMatrix& lower) {
    return psd_part(g - lower) + lower;
}

HermitianMatrix initial_gamma(const FeasibilityProblem& problem) {
    const Index m = problem.x.size();
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    const auto offsets = problem.blocks.offsets();
    for (std::size_t j = 0; j < problem.blocks.sizes.size(); ++j) {
        const Index o = offsets[j];
        const Index s = problem.blocks.sizes[j];
        out.block(o, o, s, s) =
            0.5 * (problem.x.matrix().block(o, o, s, s) + problem.y.matrix().block(o, o, s, s));
    }
    return HermitianMatrix(std::move(out));
}

double feasibility_error(const HermitianMatrix& g, const FeasibilityProblem& problem) {
    const double below = lambda_min(g - problem.y);
    const double above = lambda_min(problem.x - g);
    return std::max(0.0, -below) + std::max(0.0, -above);
}

SolveOutcome solve(const FeasibilityProblem& problem, const SolverConfig& config,
                   const SolveObserver& observer) {
    SolveOutcome outcome;
    HermitianMatrix gamma = initial_gamma(problem);

    double window_best = std::numeric_limits<double>::infinity();
    double prev_window_best = -1.0;

    for (std::size_t k = 1; k <= config.max_iter; ++k) {
        HermitianMatrix half = (k % 2 == 1) ? project_below(gamma, problem.x)
                                            : project_above(gamma, problem.y);
        gamma = project_block_diagonal_psd(half, problem.blocks);
        const double err = feasibility_error(gamma, problem);

        if (k <= 10000 || k % 10 == 0) {
            outcome.error_history.push_back({k, err});
        }
        if (observer) observer(k, gamma, err);
        outcome.iterations = k;
        outcome.residual = err;
        window_best = std::min(window_best, err);

        if (err <= config.feas_tol) {
            outcome.status = SolveStatus::Feasible;
            outcome.gamma = std::move(gamma);
            return outcome;
        }
        if (k % config.stall_window == 0) {
            if (prev_window_best >= 0.0 &&
                prev_window_best - window_best < config.stall_rel_change * prev_window_best) {
                outcome.status = SolveStatus::Stalled;
                return outcome;
            }
            prev_window_best = window_best;
            window_best = std::numeric_limits<double>::infinity();
        }
    }
    outcome.status = SolveStatus::MaxIterReached;
    return outcome;
}

}  // namespace poscon
