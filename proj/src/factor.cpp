#include <poscon/factor.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace poscon {

namespace {

/// Blockwise gamma^{-1/2} via eigendecomposition of each diagonal block,
/// preserving the block structure exactly.
ComplexMatrix inverse_sqrt_blockwise(const HermitianMatrix& gamma, const BlockStructure& blocks,
                                     double pd_tol) {
    const Index m = gamma.size();
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    const auto offsets = blocks.offsets();
    for (std::size_t j = 0; j < blocks.sizes.size(); ++j) {
        const Index o = offsets[j];
        const Index s = blocks.sizes[j];
        HermitianMatrix block(gamma.matrix().block(o, o, s, s));
        const auto eig = hermitian_eig(block);
        if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) <= pd_tol) {
            throw GammaNotPd("gamma block " + std::to_string(j) +
                             " is numerically singular (lambda_min = " +
                             std::to_string(eig.eigenvalues(0)) +
                             "); request a tighter feasibility tolerance");
        }
        RealVector mapped = eig.eigenvalues.unaryExpr(
            [](double x) { return 1.0 / std::sqrt(x); });
        out.block(o, o, s, s) =
            eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
    }
    return out;
}

}  // namespace

Decomposition construct_factors(const CanonicalForm& canon, const EigenBasis& basis,
                                const HermitianMatrix& gamma, const DecomposeConfig& config) {
    const Index m = canon.m();
    const Index p = canon.p;
    const Index q = canon.q;
    const Index n = canon.size();
    const ToleranceConfig& tol = config.tol;
    if (gamma.size() != m || basis.v.rows() != m) {
        throw DimensionMismatch("gamma/basis sizes do not match the canonical form");
    }

    // Feasibility can leave gamma - V*V barely indefinite; a feas_tol shift
    // restores strict definiteness before inversion.  Certification below
    // remains the arbiter.
    HermitianMatrix gamma_used = gamma;
    const double slack =
        lambda_min(gamma - HermitianMatrix(basis.v.adjoint() * basis.v, tol.hermitian_tol));
    if (slack < 0.0) {
        gamma_used = HermitianMatrix(
            gamma.matrix() +
            config.solver.feas_tol * ComplexMatrix::Identity(m, m));
    }

    const ComplexMatrix gamma_inv_sqrt =
        inverse_sqrt_blockwise(gamma_used, basis.blocks, tol.pd_tol);
    const ComplexMatrix u = basis.v * gamma_inv_sqrt;

    // P = I_p (+) U U* (+) 0_q.
    ComplexMatrix p_canon = ComplexMatrix::Zero(n, n);
    p_canon.topLeftCorner(p, p) = ComplexMatrix::Identity(p, p);
    p_canon.block(p, p, m, m) = u * u.adjoint();

    // Q = I_p (+) Z Z* with Z = [(U*)^{-1} D^{1/2}; A12* (U*)^{-1} D^{-1/2}];
    // blockwise this is [[(U*)^{-1} D U^{-1}, (U U*)^{-1} A12],
    //                    [A12* (U U*)^{-1},  A12* (U D U*)^{-1} A12]].
    Eigen::PartialPivLU<ComplexMatrix> u_adj_lu(u.adjoint());
    const ComplexMatrix u_adj_inv = u_adj_lu.inverse();
    const RealVector droot = basis.d.cwiseSqrt();
    ComplexMatrix z(m + q, m);
    z.topRows(m) = u_adj_inv * droot.asDiagonal();
    z.bottomRows(q) = canon.a12.adjoint() * u_adj_inv *
                      droot.cwiseInverse().asDiagonal();
    ComplexMatrix q_canon = ComplexMatrix::Zero(n, n);
    q_canon.topLeftCorner(p, p) = ComplexMatrix::Identity(p, p);
    q_canon.bottomRightCorner(m + q, m + q) = z * z.adjoint();

    Decomposition dec{
        HermitianMatrix(canon.w * p_canon * canon.w.adjoint(), tol.hermitian_tol),
        HermitianMatrix(canon.w * q_canon * canon.w.adjoint(), tol.hermitian_tol)};
    dec.p_norm = spectral_norm(dec.p.matrix());
    dec.q_norm = spectral_norm(dec.q.matrix());
    dec.p_min_eig = lambda_min(dec.p);
    dec.q_min_eig = lambda_min(dec.q);
    dec.product_residual =
        (dec.p.matrix() * dec.q.matrix() - canon.reconstruct()).norm();

    std::ostringstream failures;
    if (dec.p_norm > 1.0 + tol.norm_tol) failures << " ||P|| = " << dec.p_norm << ";";
    if (dec.q_norm > 1.0 + tol.norm_tol) failures << " ||Q|| = " << dec.q_norm << ";";
    const double psd_floor = -tol.psd_tol * std::max(1.0, std::max(dec.p_norm, dec.q_norm));
    if (dec.p_min_eig < psd_floor) failures << " lambda_min(P) = " << dec.p_min_eig << ";";
    if (dec.q_min_eig < psd_floor) failures << " lambda_min(Q) = " << dec.q_min_eig << ";";
    if (dec.product_residual > tol.decomp_tol) {
        failures << " ||PQ - A|| = " << dec.product_residual << ";";
    }
    if (!failures.str().empty()) {
        throw CertificationFailure("factor certification failed:" + failures.str());
    }
    return dec;
}

TwoByTwoVerdict decide_2x2(double a, double b, Complex p, double boundary_tol) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
        throw DomainError("decide_2x2 needs a, b in [0, 1]");
    }
    TwoByTwoVerdict verdict;
    verdict.a = a;
    verdict.b = b;
    verdict.p_abs = std::abs(p);
    verdict.bound = std::abs(std::sqrt(a) - std::sqrt(b)) * std::sqrt((1.0 - a) * (1.0 - b));
    verdict.feasible = verdict.p_abs <= verdict.bound + boundary_tol;
    return verdict;
}

TwoByTwoVerdict decide_two_point_spectrum(const ComplexMatrix& b_mat, double a, double b,
                                          const ToleranceConfig& tol) {
    if (!(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0)) {
        throw DomainError("decide_two_point_spectrum needs a, b in (0, 1]");
    }
    const Index n = b_mat.rows();
    if (b_mat.cols() != n) {
        throw DimensionMismatch("decide_two_point_spectrum needs a square matrix");
    }
    const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
    const double annihilation = ((b_mat - a * identity) * (b_mat - b * identity)).norm();
    const double scale = std::max(1.0, b_mat.norm());
    if (annihilation > tol.two_point_tol * scale * scale) {
        throw NotTwoPointSpectrum("(B - aI)(B - bI) has norm " + std::to_string(annihilation));
    }

    TwoByTwoVerdict verdict;
    verdict.a = a;
    verdict.b = b;
    const double norm_b = spectral_norm(b_mat);
    verdict.p_abs = std::sqrt(std::max(
        0.0, norm_b * norm_b - (a * a + b * b) + std::pow(a * b / norm_b, 2)));
    verdict.bound = std::abs(std::sqrt(a) - std::sqrt(b)) * std::sqrt((1.0 - a) * (1.0 - b));
    verdict.feasible = verdict.p_abs <= verdict.bound + tol.boundary_tol;
    return verdict;
}

const char* to_string(RejectionStage stage) {
    switch (stage) {
        case RejectionStage::Spectrum: return "spectrum";
        case RejectionStage::CanonicalForm: return "canonical-form";
        case RejectionStage::Feasibility: return "feasibility";
        case RejectionStage::Certification: return "certification";
    }
    return "unknown";
}

DecomposeOutcome decompose(const ComplexMatrix& a, const DecomposeConfig& config) {
    DecomposeOutcome outcome;
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("decompose needs a square matrix");
    }

    CanonicalForm canon;
    try {
        canon = canonicalize(a, config.tol);
    } catch (const NotAContraction& e) {
        outcome.spectrum = analyze_spectrum(a, config.tol);
        outcome.rejection = {RejectionStage::Spectrum, e.what()};
        return outcome;
    } catch (const ComplexOrNegativeSpectrum& e) {
        outcome.spectrum = analyze_spectrum(a, config.tol);
        outcome.rejection = {RejectionStage::Spectrum, e.what()};
        return outcome;
    } catch (const NotDiagonalizable& e) {
        outcome.spectrum = analyze_spectrum(a, config.tol);
        outcome.rejection = {RejectionStage::Spectrum, e.what()};
        return outcome;
    } catch (const ResidualTooLarge& e) {
        outcome.rejection = {RejectionStage::CanonicalForm, e.what()};
        return outcome;
    }
    outcome.spectrum = canon.spectrum;

    // No interior spectrum: the input is an orthogonal projection and is its
    // own pair of factors.
    if (canon.m() == 0) {
        const ComplexMatrix proj = canon.reconstruct();
        Decomposition dec{HermitianMatrix(proj, config.tol.hermitian_tol),
                          HermitianMatrix(proj, config.tol.hermitian_tol)};
        dec.p_norm = spectral_norm(proj);
        dec.q_norm = dec.p_norm;
        dec.p_min_eig = lambda_min(dec.p);
        dec.q_min_eig = dec.p_min_eig;
        dec.product_residual = (proj * proj - a).norm();
        outcome.decomposition = std::move(dec);
        return outcome;
    }

    try {
        const EigenBasis basis = build_eigenbasis(canon.a11, canon.spectrum, config.tol);
        const FeasibilityProblem problem =
            build_problem(basis, canon.a11, canon.a12, config.tol);
        SolveOutcome solved = solve(problem, config.solver);
        const bool feasible = solved.status == SolveStatus::Feasible;
        HermitianMatrix gamma = feasible ? *solved.gamma : initial_gamma(problem);
        outcome.solve_outcome = std::move(solved);
        if (!feasible) {
            outcome.rejection = {
                RejectionStage::Feasibility,
                outcome.solve_outcome->status == SolveStatus::Stalled
                    ? "alternating projections stalled; no feasible gamma found"
                    : "iteration limit reached before the feasibility error met the tolerance"};
            return outcome;
        }
        Decomposition dec = construct_factors(canon, basis, gamma, config);
        // Re-certify the residual against the actual input, which also
        // carries the canonicalization error.
        dec.product_residual = (dec.p.matrix() * dec.q.matrix() - a).norm();
        if (dec.product_residual > config.tol.decomp_tol) {
            throw CertificationFailure("product residual against the input is " +
                                       std::to_string(dec.product_residual));
        }
        outcome.decomposition = std::move(dec);
    } catch (const DefectiveBlock& e) {
        outcome.rejection = {RejectionStage::CanonicalForm, e.what()};
    } catch (const SingularOperand& e) {
        outcome.rejection = {RejectionStage::CanonicalForm, e.what()};
    } catch (const GammaNotPd& e) {
        outcome.rejection = {RejectionStage::Certification, e.what()};
    } catch (const CertificationFailure& e) {
        outcome.rejection = {RejectionStage::Certification, e.what()};
    }
    return outcome;
}

}  // namespace poscon
