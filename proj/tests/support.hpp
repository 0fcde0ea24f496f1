#pragma once

#include <poscon/hermitian.hpp>
#include <poscon/types.hpp>

#include <random>

namespace poscon::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline ComplexMatrix random_complex(Index rows, Index cols, std::mt19937_64& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(dist(gen), dist(gen));
        }
    }
    return m;
}

inline HermitianMatrix random_hermitian(Index n, std::mt19937_64& gen, double scale = 1.0) {
    ComplexMatrix g = random_complex(n, n, gen);
    return HermitianMatrix(scale * 0.5 * (g + g.adjoint()).eval());
}

inline ComplexMatrix random_unitary(Index n, std::mt19937_64& gen) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(n, n, gen));
    ComplexMatrix q = qr.householderQ();
    // Fix the phases so Q is uniquely determined by the input.
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// Random PSD contraction with spectral norm 1 / (1 + margin) and a random
/// eigenbasis; optionally rank deficient.  Nonzero eigenvalues stay bounded
/// away from zero: interior eigenvalues of the product then stay on the
/// scale the float64 sandwich problem can resolve, matching the conditioning
/// of the published instances.
inline HermitianMatrix random_psd_contraction(Index n, std::mt19937_64& gen,
                                              double margin = 0.1, Index rank_drop = 0) {
    std::uniform_real_distribution<double> spread(0.2, 1.0);
    RealVector values(n);
    for (Index i = 0; i < n; ++i) values(i) = spread(gen);
    for (Index i = 0; i < rank_drop && i < n - 1; ++i) values(i) = 0.0;
    values /= values.maxCoeff() * (1.0 + margin);
    ComplexMatrix basis = random_unitary(n, gen);
    return HermitianMatrix(basis * values.asDiagonal() * basis.adjoint());
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace poscon::testing
