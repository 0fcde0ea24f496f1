#include <poscon/canonical.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace poscon {

Index SpectrumReport::interior_count() const {
    Index m = 0;
    for (const auto& g : interior_groups) m += g.multiplicity;
    return m;
}

namespace {

enum class SpectralClass { One, Zero, Interior };

struct Classified {
    SpectralClass cls;
    int group = -1;  // interior group index, descending alpha
};

Index matrix_rank(const ComplexMatrix& m, double cutoff) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > cutoff) ++r;
    }
    return r;
}

SpectralClass classify(Complex lambda, double tol_one) {
    if (std::abs(lambda - Complex(1.0, 0.0)) <= tol_one) return SpectralClass::One;
    if (std::abs(lambda) <= tol_one) return SpectralClass::Zero;
    return SpectralClass::Interior;
}

/// Single-linkage clustering of the interior eigenvalues: sorted by real
/// part, a new cluster starts whenever the gap to the previous member
/// exceeds the linkage radius.
std::vector<InteriorGroup> cluster_interior(std::vector<Complex> values, double linkage) {
    std::vector<InteriorGroup> groups;
    if (values.empty()) return groups;
    std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<std::vector<Complex>> chains{{values.front()}};
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::abs(values[i] - chains.back().back()) <= linkage) {
            chains.back().push_back(values[i]);
        } else {
            chains.push_back({values[i]});
        }
    }
    for (const auto& chain : chains) {
        Complex mean = std::accumulate(chain.begin(), chain.end(), Complex(0.0)) /
                       static_cast<double>(chain.size());
        double radius = 0.0;
        for (Complex v : chain) radius = std::max(radius, std::abs(v - mean));
        groups.push_back({mean.real(), static_cast<Index>(chain.size()), radius});
    }
    // descending alpha
    std::sort(groups.begin(), groups.end(),
              [](const InteriorGroup& a, const InteriorGroup& b) { return a.alpha > b.alpha; });
    return groups;
}

SpectrumReport build_report(const ComplexMatrix& a, const ComplexVector& eigenvalues,
                            const ToleranceConfig& tol) {
    SpectrumReport report;
    report.eigenvalues = eigenvalues;
    report.spectral_norm_value = spectral_norm(a);
    report.contraction = report.spectral_norm_value <= 1.0 + tol.norm_tol;

    std::vector<Complex> interior;
    report.real_unit_spectrum = true;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const Complex lambda = eigenvalues(i);
        if (std::abs(lambda.imag()) > tol.tol_one || lambda.real() < -tol.norm_tol ||
            lambda.real() > 1.0 + tol.norm_tol) {
            report.real_unit_spectrum = false;
        }
        switch (classify(lambda, tol.tol_one)) {
            case SpectralClass::One: ++report.ones_count; break;
            case SpectralClass::Zero: ++report.zeros_count; break;
            case SpectralClass::Interior: interior.push_back(lambda); break;
        }
    }

    const double scale = std::max(1.0, report.spectral_norm_value);
    report.interior_groups = cluster_interior(std::move(interior), tol.cluster_tol * scale);

    // Diagonalizability: geometric multiplicity must match the cluster size,
    // i.e. rank(A - alpha I) = n - multiplicity, for every cluster including
    // the {1} and {0} ones.
    const Index n = a.rows();
    const double rank_cut = tol.rank_tol * scale;
    report.diagonalizable = true;
    auto check_rank = [&](double alpha, Index mult) {
        ComplexMatrix shifted = a - alpha * ComplexMatrix::Identity(n, n);
        if (matrix_rank(shifted, rank_cut) != n - mult) report.diagonalizable = false;
    };
    if (report.ones_count > 0) check_rank(1.0, report.ones_count);
    if (report.zeros_count > 0) check_rank(0.0, report.zeros_count);
    for (const auto& g : report.interior_groups) check_rank(g.alpha, g.multiplicity);
    return report;
}

/// Unitary swap of adjacent diagonal entries of an upper-triangular T,
/// applied in place to T and accumulated into U.
void swap_adjacent(ComplexMatrix& t, ComplexMatrix& u, Index i) {
    const Complex a = t(i, i);
    const Complex b = t(i, i + 1);
    const Complex d = t(i + 1, i + 1);
    // (b, d - a) spans the eigenvector of [[a, b], [0, d]] for d.
    const double r = std::sqrt(std::norm(b) + std::norm(d - a));
    if (r == 0.0) return;  // equal entries, nothing to move
    const Complex c = b / r;
    const Complex s = (d - a) / r;
    Eigen::Matrix2cd g;
    g << c, -std::conj(s), s, std::conj(c);
    t.middleRows(i, 2) = (g.adjoint() * t.middleRows(i, 2)).eval();
    t.middleCols(i, 2) = (t.middleCols(i, 2) * g).eval();
    u.middleCols(i, 2) = (u.middleCols(i, 2) * g).eval();
    t(i + 1, i) = Complex(0.0);
}

int target_rank(Complex lambda, const SpectrumReport& report, double tol_one) {
    switch (classify(lambda, tol_one)) {
        case SpectralClass::One: return 0;
        case SpectralClass::Zero: return static_cast<int>(report.interior_groups.size()) + 1;
        case SpectralClass::Interior: break;
    }
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < report.interior_groups.size(); ++j) {
        const double dist = std::abs(lambda.real() - report.interior_groups[j].alpha);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(j);
        }
    }
    return best + 1;
}

}  // namespace

SpectrumReport analyze_spectrum(const ComplexMatrix& a, const ToleranceConfig& tol) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("analyze_spectrum needs a square matrix");
    }
    if (a.size() == 0) {
        SpectrumReport empty;
        empty.diagonalizable = true;
        empty.contraction = true;
        empty.real_unit_spectrum = true;
        return empty;
    }
    Eigen::ComplexSchur<ComplexMatrix> schur(a, /*computeU=*/false);
    if (schur.info() != Eigen::Success) {
        throw NonConvergence("Schur decomposition failed to converge");
    }
    return build_report(a, schur.matrixT().diagonal(), tol);
}

ComplexMatrix CanonicalForm::assemble() const {
    const Index n = size();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    out.topLeftCorner(p, p) = ComplexMatrix::Identity(p, p);
    out.block(p, p, m(), m()) = a11;
    out.block(p, p + m(), m(), q) = a12;
    return out;
}

ComplexMatrix CanonicalForm::reconstruct() const {
    return w * assemble() * w.adjoint();
}

CanonicalForm canonicalize(const ComplexMatrix& a, const ToleranceConfig& tol) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("canonicalize needs a square matrix");
    }
    const Index n = a.rows();
    Eigen::ComplexSchur<ComplexMatrix> schur(a, /*computeU=*/true);
    if (n > 0 && schur.info() != Eigen::Success) {
        throw NonConvergence("Schur decomposition failed to converge");
    }
    ComplexMatrix t = schur.matrixT();
    ComplexMatrix u = schur.matrixU();
    if (n == 0) {
        t = ComplexMatrix(0, 0);
        u = ComplexMatrix(0, 0);
    }

    SpectrumReport report = build_report(a, t.diagonal(), tol);
    if (!report.contraction) {
        throw NotAContraction("spectral norm " + std::to_string(report.spectral_norm_value) +
                              " exceeds 1 + " + std::to_string(tol.norm_tol));
    }
    if (!report.real_unit_spectrum) {
        throw ComplexOrNegativeSpectrum(
            "spectrum is not real inside [0, 1]: the matrix is not similar to a "
            "nonnegative diagonal matrix");
    }
    if (!report.diagonalizable) {
        throw NotDiagonalizable("some eigenvalue cluster has geometric multiplicity "
                                "below its algebraic multiplicity");
    }

    // Stable bubble reordering toward (ones, interior descending, zeros),
    // keeping cluster members adjacent and in their original relative order.
    std::vector<int> ranks(n);
    for (Index i = 0; i < n; ++i) ranks[i] = target_rank(t(i, i), report, tol.tol_one);
    for (Index pass = 0; pass + 1 < n; ++pass) {
        for (Index i = 0; i + 1 < n; ++i) {
            if (ranks[i] > ranks[i + 1]) {
                swap_adjacent(t, u, i);
                std::swap(ranks[i], ranks[i + 1]);
            }
        }
    }

    const Index p = report.ones_count;
    const Index m = report.interior_count();
    const Index q = report.zeros_count;

    const double scale = std::max(1.0, a.norm());
    const double bar = tol.canon_tol * scale;
    auto require_small = [&](double residual, const char* what) {
        if (residual > bar) {
            std::ostringstream msg;
            msg << what << " residual " << residual << " exceeds " << bar;
            throw ResidualTooLarge(msg.str());
        }
    };
    require_small((t.topLeftCorner(p, p) - ComplexMatrix::Identity(p, p)).norm(),
                  "identity block");
    require_small(t.block(0, p, p, m).norm(), "coupling block above the interior part");
    require_small(t.block(0, p + m, p, q).norm(), "coupling block above the zero part");
    require_small(t.bottomRightCorner(q, q).norm(), "trailing zero block");
    if ((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() >
        tol.unitary_tol * std::max<double>(1.0, n)) {
        throw NonConvergence("Schur basis lost unitarity");
    }

    CanonicalForm form;
    form.w = std::move(u);
    form.p = p;
    form.q = q;
    form.a11 = t.block(p, p, m, m);
    form.a12 = t.block(p, p + m, m, q);
    form.spectrum = std::move(report);

    require_small((form.reconstruct() - a).norm(), "canonical reconstruction");
    return form;
}

}  // namespace poscon
