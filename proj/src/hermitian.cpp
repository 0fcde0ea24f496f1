#include <poscon/hermitian.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace poscon {

HermitianMatrix::HermitianMatrix(ComplexMatrix matrix, double hermitian_tol) {
    if (matrix.rows() != matrix.cols()) {
        throw DimensionMismatch("Hermitian matrix must be square, got " +
                                std::to_string(matrix.rows()) + "x" +
                                std::to_string(matrix.cols()));
    }
    if (!matrix.allFinite()) {
        throw Error("Hermitian matrix has non-finite entries");
    }
    const double asym = (matrix - matrix.adjoint()).norm();
    const double scale = std::max(1.0, matrix.norm());
    if (asym > hermitian_tol * scale) {
        throw Error("matrix is not Hermitian: ||H - H*|| = " + std::to_string(asym));
    }
    mat_ = 0.5 * (matrix + matrix.adjoint().eval());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
    return HermitianMatrix(mat_ + other.mat_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
    return HermitianMatrix(mat_ - other.mat_);
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
    if (h.size() == 0) {
        return {RealVector(0), ComplexMatrix(0, 0)};
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("Hermitian eigensolver failed to converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

// Rebuild V f(diag) V* for a scalar function of the eigenvalues.
template <typename F>
ComplexMatrix apply_spectral(const EigenDecomposition& eig, F&& f) {
    RealVector mapped = eig.eigenvalues.unaryExpr(std::forward<F>(f));
    return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

HermitianMatrix psd_part(const HermitianMatrix& h) {
    const auto eig = hermitian_eig(h);
    return HermitianMatrix(apply_spectral(eig, [](double x) { return std::max(x, 0.0); }));
}

HermitianMatrix principal_sqrt(const HermitianMatrix& h, double psd_tol) {
    const auto eig = hermitian_eig(h);
    const double scale = eig.eigenvalues.size() == 0
                             ? 0.0
                             : eig.eigenvalues.cwiseAbs().maxCoeff();
    const double floor = -psd_tol * std::max(1.0, scale);
    if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) < floor) {
        throw NotPsd("principal_sqrt of an indefinite matrix: lambda_min = " +
                     std::to_string(eig.eigenvalues(0)));
    }
    return HermitianMatrix(
        apply_spectral(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); }));
}

HermitianMatrix moore_penrose(const HermitianMatrix& h, double rank_tol) {
    const auto eig = hermitian_eig(h);
    const double scale = eig.eigenvalues.size() == 0
                             ? 0.0
                             : eig.eigenvalues.cwiseAbs().maxCoeff();
    const double cutoff = rank_tol * scale;
    return HermitianMatrix(apply_spectral(
        eig, [cutoff](double x) { return std::abs(x) <= cutoff ? 0.0 : 1.0 / x; }));
}

double lambda_min(const HermitianMatrix& h) {
    const auto eig = hermitian_eig(h);
    return eig.eigenvalues.size() == 0 ? 0.0 : eig.eigenvalues(0);
}

double lambda_max(const HermitianMatrix& h) {
    const auto eig = hermitian_eig(h);
    return eig.eigenvalues.size() == 0 ? 0.0
                                       : eig.eigenvalues(eig.eigenvalues.size() - 1);
}

double spectral_norm(const ComplexMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

HermitianMatrix psd_inverse(const HermitianMatrix& h, double pd_tol) {
    const auto eig = hermitian_eig(h);
    if (eig.eigenvalues.size() == 0) {
        return h;
    }
    const double lmin = eig.eigenvalues(0);
    const double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (lmin <= pd_tol * std::max(1.0, lmax)) {
        throw SingularOperand("psd_inverse of a singular operand: lambda_min = " +
                              std::to_string(lmin));
    }
    return HermitianMatrix(apply_spectral(eig, [](double x) { return 1.0 / x; }));
}

}  // namespace poscon
