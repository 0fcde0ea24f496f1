#include <poscon/dilation.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace poscon {

DilationData build_dilation(const CanonicalForm& canon, const ComplexMatrix& u11,
                            const RealVector& d, const ToleranceConfig& tol) {
    const Index m = canon.m();
    const Index p = canon.p;
    const Index q = canon.q;
    if (u11.rows() != m || u11.cols() != m || d.size() != m) {
        throw DimensionMismatch("U11/D sizes do not match the canonical form");
    }
    const ComplexMatrix dmat = d.asDiagonal();
    if ((canon.a11 * u11 - u11 * dmat).norm() > tol.dil_tol * std::max(1.0, u11.norm())) {
        throw ConditionCViolated("U11 does not intertwine A11 and D");
    }
    if (spectral_norm(u11) > 1.0 + tol.norm_tol) {
        throw ConditionCViolated("U11 is not a contraction");
    }

    const HermitianMatrix uu(u11 * u11.adjoint(), tol.hermitian_tol);
    ComplexMatrix r;
    try {
        const HermitianMatrix uu_inv = psd_inverse(uu, tol.pd_tol);
        r = principal_sqrt(HermitianMatrix(uu_inv.matrix() -
                                           ComplexMatrix::Identity(m, m)),
                           tol.psd_tol)
                .matrix();
    } catch (const NotPsd&) {
        throw ConditionCViolated("(U11 U11*)^{-1} - I is indefinite");
    } catch (const SingularOperand&) {
        throw ConditionCViolated("U11 is numerically singular");
    }

    ComplexMatrix gap = u11 * dmat * u11.adjoint() - canon.a11 * canon.a11.adjoint() -
                        canon.a12 * canon.a12.adjoint();
    ComplexMatrix c;
    try {
        const ComplexMatrix root =
            principal_sqrt(HermitianMatrix(std::move(gap), tol.hermitian_tol), tol.psd_tol)
                .matrix();
        c = Eigen::PartialPivLU<ComplexMatrix>(canon.a11).solve(root);
    } catch (const NotPsd&) {
        throw ConditionCViolated("U11 D U11* - A11 A11* - A12 A12* is indefinite");
    }

    // T~ = I_p (+) [[A11, A12, 0, A11 C], [0, 0, 0, 0],
    //               [R A11, R A12, 0, R A11 C], [0, 0, 0, 0]].
    const Index big = p + m + q + m + m;
    ComplexMatrix t = ComplexMatrix::Zero(big, big);
    t.topLeftCorner(p, p) = ComplexMatrix::Identity(p, p);
    const Index o1 = p;          // interior rows
    const Index o2 = p + m;      // zero rows
    const Index o3 = p + m + q;  // R rows
    t.block(o1, o1, m, m) = canon.a11;
    t.block(o1, o2, m, q) = canon.a12;
    t.block(o1, o3 + m, m, m) = canon.a11 * c;
    t.block(o3, o1, m, m) = r * canon.a11;
    t.block(o3, o2, m, q) = r * canon.a12;
    t.block(o3, o3 + m, m, m) = r * canon.a11 * c;
    return DilationData{std::move(r), std::move(c), std::move(t)};
}

ProjectionProductCheck is_projection_product(const ComplexMatrix& t, double tol,
                                             const ToleranceConfig& config) {
    ProjectionProductCheck check;
    const Index n = t.rows();
    if (t.cols() != n) {
        throw DimensionMismatch("is_projection_product needs a square matrix");
    }
    const SpectrumReport spectrum = analyze_spectrum(t, config);
    if (!spectrum.real_unit_spectrum || spectrum.spectral_norm_value < 0.0) {
        check.diagnostics = "spectrum is not real inside [0, 1]";
        return check;
    }
    for (const auto& g : spectrum.interior_groups) {
        if (g.alpha <= 0.0 || g.alpha >= 1.0) {
            check.diagnostics = "interior eigenvalue outside (0, 1)";
            return check;
        }
    }
    if (!spectrum.diagonalizable) {
        check.diagnostics = "matrix is not diagonalizable";
        return check;
    }

    const double scale = std::max(1.0, spectrum.spectral_norm_value);
    const Index p = spectrum.ones_count;

    // The eigenvalue-1 eigenspace must reduce T: each unit eigenvector u with
    // T u = u must also satisfy T* u = u.  The orthogonal complement then
    // carries the compression A1.
    Eigen::JacobiSVD<ComplexMatrix> one_svd(t - ComplexMatrix::Identity(n, n),
                                            Eigen::ComputeFullV);
    const ComplexMatrix ones_basis = one_svd.matrixV().rightCols(p);
    const ComplexMatrix rest_basis = one_svd.matrixV().leftCols(n - p);
    if ((t.adjoint() * ones_basis - ones_basis).norm() > tol * scale * std::max<double>(1, p)) {
        check.diagnostics = "eigenvalue-1 eigenspace does not reduce the matrix";
        return check;
    }
    const ComplexMatrix a1 = rest_basis.adjoint() * t * rest_basis;

    // Interior eigenvectors of A1, orthonormal within each eigenvalue group.
    const Index m = spectrum.interior_count();
    ComplexMatrix s(n - p, m);
    RealVector alphas(m);
    Index offset = 0;
    for (const auto& g : spectrum.interior_groups) {
        Eigen::JacobiSVD<ComplexMatrix> svd(
            a1 - g.alpha * ComplexMatrix::Identity(n - p, n - p), Eigen::ComputeFullV);
        const double cutoff =
            std::max(config.rank_tol * scale, 4.0 * g.radius + 10.0 * tol);
        Index null_dim = 0;
        for (Index i = 0; i < n - p; ++i) {
            if (svd.singularValues()(i) <= cutoff) ++null_dim;
        }
        if (null_dim != g.multiplicity) {
            check.diagnostics = "interior eigenspace dimension mismatch";
            return check;
        }
        s.middleCols(offset, g.multiplicity) = svd.matrixV().rightCols(g.multiplicity);
        alphas.segment(offset, g.multiplicity).setConstant(g.alpha);
        offset += g.multiplicity;
    }

    if (m > 0) {
        Eigen::JacobiSVD<ComplexMatrix> s_svd(s);
        if (s_svd.singularValues()(m - 1) <= config.rank_tol * scale) {
            check.diagnostics = "interior eigenvector matrix is rank deficient";
            return check;
        }
    }
    const double eig_res = (a1 * s - s * alphas.asDiagonal().toDenseMatrix()).norm();
    const double gram_res =
        (a1 * a1.adjoint() * s - s * alphas.asDiagonal().toDenseMatrix()).norm();
    if (eig_res > tol * scale * std::max<double>(1, m) ||
        gram_res > tol * scale * std::max<double>(1, m)) {
        std::ostringstream msg;
        msg << "S-criterion failed: ||A1 S - S diag|| = " << eig_res
            << ", ||A1 A1* S - S diag|| = " << gram_res;
        check.diagnostics = msg.str();
        return check;
    }
    check.verdict = true;
    check.witness = std::move(s);
    return check;
}

ValidationReport cross_validate(const ComplexMatrix& a, const Decomposition& dec, double tol) {
    ValidationReport report;
    const Index n = a.rows();
    if (dec.p.size() != n || dec.q.size() != n) {
        throw DimensionMismatch("decomposition size does not match the matrix");
    }
    const ComplexMatrix& p = dec.p.matrix();
    const ComplexMatrix& q = dec.q.matrix();
    const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
    const ComplexMatrix sp =
        principal_sqrt(HermitianMatrix(p - p * p), /*psd_tol=*/1e-8).matrix();
    const ComplexMatrix sq =
        principal_sqrt(HermitianMatrix(q - q * q), /*psd_tol=*/1e-8).matrix();

    ComplexMatrix p_big = ComplexMatrix::Zero(3 * n, 3 * n);
    p_big.block(0, 0, n, n) = p;
    p_big.block(0, n, n, n) = sp;
    p_big.block(n, 0, n, n) = sp;
    p_big.block(n, n, n, n) = identity - p;

    ComplexMatrix q_big = ComplexMatrix::Zero(3 * n, 3 * n);
    q_big.block(0, 0, n, n) = q;
    q_big.block(0, 2 * n, n, n) = sq;
    q_big.block(2 * n, 0, n, n) = sq;
    q_big.block(2 * n, 2 * n, n, n) = identity - q;

    const double scale = std::max(1.0, a.norm());
    auto record = [&](double residual, bool& flag, const std::string& label) {
        report.max_residual = std::max(report.max_residual, residual);
        flag = residual <= tol * scale;
        if (!flag) {
            report.violations.push_back(label + " residual " + std::to_string(residual));
        }
    };
    const double p_res = std::max((p_big * p_big - p_big).norm(),
                                  (p_big - p_big.adjoint()).norm());
    const double q_res = std::max((q_big * q_big - q_big).norm(),
                                  (q_big - q_big.adjoint()).norm());
    record(p_res, report.p_projection, "P dilation idempotence");
    record(q_res, report.q_projection, "Q dilation idempotence");
    const ComplexMatrix product = p_big * q_big;
    record((product.topLeftCorner(n, n) - a).norm(), report.product_matches,
           "product block");
    return report;
}

}  // namespace poscon
