#pragma once

#include <poscon/types.hpp>

namespace poscon {

/// A square complex matrix known to be Hermitian.  Construction symmetrizes
/// the input via (H + H*)/2 and rejects inputs whose asymmetry exceeds
/// tol * max(1, ||H||_F).  Instances are immutable values.
class HermitianMatrix {
public:
    explicit HermitianMatrix(ComplexMatrix matrix, double hermitian_tol = 1e-10);

    const ComplexMatrix& matrix() const { return mat_; }
    Index size() const { return mat_.rows(); }

    HermitianMatrix operator+(const HermitianMatrix& other) const;
    HermitianMatrix operator-(const HermitianMatrix& other) const;

private:
    ComplexMatrix mat_;
};

/// Spectral decomposition H = V diag(eigenvalues) V* with ascending
/// eigenvalues and unitary V.
struct EigenDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

EigenDecomposition hermitian_eig(const HermitianMatrix& h);

/// Positive semidefinite part (H + sqrt(H^2))/2: clips negative eigenvalues
/// to zero in H's own eigenbasis.
HermitianMatrix psd_part(const HermitianMatrix& h);

/// Principal square root of a PSD matrix.  Eigenvalues in
/// [-psd_tol * ||H||, 0) are clipped to zero; anything lower throws NotPsd.
HermitianMatrix principal_sqrt(const HermitianMatrix& h, double psd_tol = 1e-10);

/// Moore-Penrose inverse: eigenvalues with |lambda| <= rank_tol * ||H||_2 map
/// to zero, the rest to 1/lambda.
HermitianMatrix moore_penrose(const HermitianMatrix& h, double rank_tol);

double lambda_min(const HermitianMatrix& h);
double lambda_max(const HermitianMatrix& h);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

/// Inverse of a positive definite matrix; throws SingularOperand when
/// lambda_min <= pd_tol * max(1, lambda_max).
HermitianMatrix psd_inverse(const HermitianMatrix& h, double pd_tol = 1e-12);

}  // namespace poscon
