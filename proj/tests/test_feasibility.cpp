#include <doctest.h>

#include <poscon/canonical.hpp>
#include <poscon/feasibility.hpp>
#include <poscon/reference_cases.hpp>

#include "support.hpp"

#include <cmath>

using namespace poscon;
using namespace poscon::testing;

namespace {

SpectrumReport manual_spectrum(std::initializer_list<std::pair<double, Index>> groups) {
    SpectrumReport report;
    report.diagonalizable = true;
    report.contraction = true;
    report.real_unit_spectrum = true;
    for (const auto& [alpha, mult] : groups) {
        report.interior_groups.push_back({alpha, mult, 0.0});
    }
    return report;
}

FeasibilityProblem reference_problem_3x3() {
    const auto inst = refdata::example_3x3();
    EigenBasis basis = build_eigenbasis(inst.a11, manual_spectrum({{0.15, 2}, {0.2, 1}}));
    basis = align_to_reference(basis, inst.v_ref);
    return build_problem(basis, inst.a11, inst.a12);
}

}  // namespace

TEST_SUITE("feasibility engine") {

TEST_CASE("build_eigenbasis on a diagonal block") {
    ComplexMatrix a11 = ComplexMatrix::Zero(2, 2);
    a11(0, 0) = 0.9;
    a11(1, 1) = 0.4;
    auto basis = build_eigenbasis(a11, manual_spectrum({{0.9, 1}, {0.4, 1}}));
    CHECK(max_abs_diff(basis.v.cwiseAbs(), ComplexMatrix::Identity(2, 2)) <= 1e-12);
    CHECK(basis.d(0) == doctest::Approx(0.9));
    CHECK(basis.d(1) == doctest::Approx(0.4));
    CHECK(basis.min_singular_value == doctest::Approx(1.0));
}

TEST_CASE("build_eigenbasis spans the reference 3x3 eigenspaces") {
    const auto inst = refdata::example_3x3();
    auto basis = build_eigenbasis(inst.a11, manual_spectrum({{0.15, 2}, {0.2, 1}}));
    // residual of the eigen equation and within-group orthonormality
    CHECK((inst.a11 * basis.v - basis.v * basis.d.asDiagonal().toDenseMatrix()).norm() <=
          1e-12);
    CHECK((basis.v.leftCols(2).adjoint() * basis.v.leftCols(2) -
           ComplexMatrix::Identity(2, 2))
              .norm() <= 1e-12);
    // the 0.15 eigenspace is span{e1, e2}
    CHECK(basis.v.leftCols(2).bottomRows(1).norm() <= 1e-12);
    // aligning to the published choice reproduces it exactly
    auto aligned = align_to_reference(basis, inst.v_ref);
    CHECK(max_abs_diff(aligned.v, inst.v_ref) <= 1e-12);
}

TEST_CASE("build_eigenbasis on the 5x5 instance has unit and within-group orthogonal columns") {
    const auto inst = refdata::example_5x5();
    auto basis = build_eigenbasis(inst.a11,
                                  manual_spectrum({{0.125, 1}, {0.0625, 2}, {0.2, 2}}));
    for (Index j = 0; j < 5; ++j) {
        CHECK(basis.v.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(std::abs(basis.v.col(1).dot(basis.v.col(2))) <= 1e-12);
    CHECK(std::abs(basis.v.col(3).dot(basis.v.col(4))) <= 1e-12);
    CHECK((inst.a11 * basis.v - basis.v * basis.d.asDiagonal().toDenseMatrix()).norm() <=
          1e-12);
    // the published (rounded) choice is within print precision of an exact basis
    auto aligned = align_to_reference(basis, inst.v_ref);
    CHECK(max_abs_diff(aligned.v, inst.v_ref) <= 1e-3);
    CHECK((inst.a11 * aligned.v - aligned.v * basis.d.asDiagonal().toDenseMatrix()).norm() <=
          1e-12);
}

TEST_CASE("build_eigenbasis rejects a defective block") {
    ComplexMatrix jordan(2, 2);
    jordan << 0.5, 1.0, 0, 0.5;
    CHECK_THROWS_AS(build_eigenbasis(jordan, manual_spectrum({{0.5, 2}})), DefectiveBlock);
}

TEST_CASE("build_problem reproduces the published 3x3 matrices") {
    FeasibilityProblem problem = reference_problem_3x3();
    CHECK(max_abs_diff(problem.x.matrix(), refdata::example_3x3_x_ref()) <= 1e-4);
    CHECK(max_abs_diff(problem.y.matrix(), refdata::example_3x3_y_ref()) <= 1e-4);
    // exact values of the off-block couplings
    CHECK(problem.y.matrix()(0, 2).real() == doctest::Approx(3.0 / (5 * std::sqrt(2.0))));
    CHECK(problem.y.matrix()(1, 2).real() == doctest::Approx(-3.0 / (5 * std::sqrt(2.0))));
}

TEST_CASE("build_problem on the corollary 2x2 instance") {
    const double a = 0.5, b = 0.3, p = 0.09429;
    const auto inst = refdata::boundary_pair(p);
    auto basis = build_eigenbasis(inst.a11, manual_spectrum({{a, 1}, {b, 1}}));
    const double gamma = std::sqrt((a - b) * (a - b) + p * p);
    ComplexMatrix v_ref(2, 2);
    v_ref << 1, p / gamma, 0, (b - a) / gamma;
    basis = align_to_reference(basis, v_ref);
    CHECK(max_abs_diff(basis.v, v_ref) <= 1e-12);
    auto problem = build_problem(basis, inst.a11, inst.a12);
    // V*V = [[1, p/gamma], [p/gamma, 1]]
    CHECK(problem.y.matrix()(0, 0).real() == doctest::Approx(1.0));
    CHECK(problem.y.matrix()(1, 1).real() == doctest::Approx(1.0));
    CHECK(problem.y.matrix()(0, 1).real() == doctest::Approx(p / gamma));
    CHECK(lambda_min(problem.x) > 0.0);
}

TEST_CASE("build_problem needs an invertible Gram block") {
    ComplexMatrix a11 = ComplexMatrix::Zero(2, 2);
    a11(0, 0) = 0.5;  // second row of [A11 A12] is zero
    ComplexMatrix a12 = ComplexMatrix::Zero(2, 0);
    auto basis = build_eigenbasis(
        ComplexMatrix(ComplexMatrix::Zero(2, 2)).eval() + a11,
        manual_spectrum({{0.5, 1}, {0.0, 1}}));
    CHECK_THROWS_AS(build_problem(basis, a11, a12), SingularOperand);
}

TEST_CASE("projection examples") {
    BlockStructure blocks{{1, 1}};

    SUBCASE("block-diagonal PSD projection") {
        ComplexMatrix g(2, 2);
        g << 1, 5, 5, -1;
        auto proj = project_block_diagonal_psd(HermitianMatrix(g), blocks);
        ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
        expected(0, 0) = 1;
        CHECK(max_abs_diff(proj.matrix(), expected) <= 1e-14);

        // fixed point on a block-diagonal PSD input
        ComplexMatrix fixed = ComplexMatrix::Zero(2, 2);
        fixed(0, 0) = 2;
        fixed(1, 1) = 3;
        CHECK(max_abs_diff(project_block_diagonal_psd(HermitianMatrix(fixed), blocks).matrix(),
                           fixed) <= 1e-14);

        // full 2x2 block: psd_part by hand
        ComplexMatrix flip(2, 2);
        flip << 0, 1, 1, 0;
        ComplexMatrix half(2, 2);
        half << 0.5, 0.5, 0.5, 0.5;
        CHECK(max_abs_diff(
                  project_block_diagonal_psd(HermitianMatrix(flip), BlockStructure{{2}})
                      .matrix(),
                  half) <= 1e-14);
    }

    SUBCASE("projection under the upper bound") {
        ComplexMatrix x(2, 2);
        x << 1, 0, 0, 2;
        HermitianMatrix upper(x);
        HermitianMatrix inside(ComplexMatrix(0.5 * x));
        CHECK(max_abs_diff(project_below(inside, upper).matrix(), inside.matrix()) <= 1e-14);
        HermitianMatrix above(ComplexMatrix(x + ComplexMatrix::Identity(2, 2)));
        CHECK(max_abs_diff(project_below(above, upper).matrix(), upper.matrix()) <= 1e-14);
        // G = 2X: X - (X - G)^+ = X since X - G = -X is negative definite
        HermitianMatrix twice(ComplexMatrix(2 * x));
        CHECK(max_abs_diff(project_below(twice, upper).matrix(), upper.matrix()) <= 1e-14);
    }

    SUBCASE("projection above the lower bound") {
        ComplexMatrix y(2, 2);
        y << 1, 0.25, 0.25, 1;
        HermitianMatrix lower(y);
        CHECK(max_abs_diff(project_above(lower, lower).matrix(), lower.matrix()) <= 1e-14);
        HermitianMatrix above(ComplexMatrix(y + ComplexMatrix::Identity(2, 2)));
        CHECK(max_abs_diff(project_above(above, lower).matrix(), above.matrix()) <= 1e-14);
        HermitianMatrix below(ComplexMatrix(y - ComplexMatrix::Identity(2, 2)));
        CHECK(max_abs_diff(project_above(below, lower).matrix(), lower.matrix()) <= 1e-14);
    }
}

TEST_CASE("projections are members, idempotent and nonexpansive") {
    auto gen = rng(31);
    BlockStructure blocks{{2, 1, 2}};
    HermitianMatrix x = random_hermitian(5, gen);
    HermitianMatrix y = random_hermitian(5, gen);
    for (int trial = 0; trial < 200; ++trial) {
        HermitianMatrix g1 = random_hermitian(5, gen, 2.0);
        HermitianMatrix g2 = random_hermitian(5, gen, 2.0);

        auto p0 = project_block_diagonal_psd(g1, blocks);
        CHECK(lambda_min(p0) >= -1e-9);
        const auto offsets = blocks.offsets();
        for (std::size_t j = 0; j < blocks.sizes.size(); ++j) {
            for (std::size_t l = 0; l < blocks.sizes.size(); ++l) {
                if (j == l) continue;
                CHECK(p0.matrix()
                          .block(offsets[j], offsets[l], blocks.sizes[j], blocks.sizes[l])
                          .norm() == 0.0);
            }
        }
        CHECK(max_abs_diff(project_block_diagonal_psd(p0, blocks).matrix(), p0.matrix()) <=
              1e-10);

        auto p1 = project_below(g1, x);
        CHECK(lambda_min(x - p1) >= -1e-9);
        CHECK(max_abs_diff(project_below(p1, x).matrix(), p1.matrix()) <= 1e-10);

        auto p2 = project_above(g1, y);
        CHECK(lambda_min(p2 - y) >= -1e-9);
        CHECK(max_abs_diff(project_above(p2, y).matrix(), p2.matrix()) <= 1e-10);

        // nonexpansiveness in Frobenius norm
        const double dist = (g1.matrix() - g2.matrix()).norm();
        CHECK((project_block_diagonal_psd(g1, blocks).matrix() -
               project_block_diagonal_psd(g2, blocks).matrix())
                  .norm() <= dist + 1e-10);
        CHECK((project_below(g1, x).matrix() - project_below(g2, x).matrix()).norm() <=
              dist + 1e-10);
        CHECK((project_above(g1, y).matrix() - project_above(g2, y).matrix()).norm() <=
              dist + 1e-10);
    }
}

TEST_CASE("initial_gamma examples") {
    SUBCASE("identity problem") {
        HermitianMatrix id{ComplexMatrix::Identity(3, 3)};
        FeasibilityProblem problem{id, id, BlockStructure{{2, 1}}};
        CHECK(max_abs_diff(initial_gamma(problem).matrix(), id.matrix()) <= 1e-14);
    }
    SUBCASE("reference 3x3: blockwise average by hand") {
        FeasibilityProblem problem = reference_problem_3x3();
        ComplexMatrix expected(3, 3);
        expected << 1.15, -0.15, 0, -0.15, 1.15, 0, 0, 0, 1.3;
        CHECK(max_abs_diff(initial_gamma(problem).matrix(), expected) <= 1e-6);
    }
    SUBCASE("unit-diagonal Y gives (X_jj + 1) / 2") {
        ComplexMatrix x(2, 2);
        x << 3, 1, 1, 5;
        FeasibilityProblem problem{HermitianMatrix(x),
                                   HermitianMatrix(ComplexMatrix::Identity(2, 2)),
                                   BlockStructure{{1, 1}}};
        ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
        expected(0, 0) = 2.0;
        expected(1, 1) = 3.0;
        CHECK(max_abs_diff(initial_gamma(problem).matrix(), expected) <= 1e-14);
    }
}

TEST_CASE("feasibility_error examples") {
    ComplexMatrix x(2, 2);
    x << 2, 0, 0, 2;
    HermitianMatrix upper(x);
    HermitianMatrix lower{ComplexMatrix::Identity(2, 2)};
    FeasibilityProblem problem{upper, lower, BlockStructure{{1, 1}}};

    HermitianMatrix feasible{ComplexMatrix(1.5 * ComplexMatrix::Identity(2, 2))};
    CHECK(feasibility_error(feasible, problem) == 0.0);

    HermitianMatrix low{ComplexMatrix(lower.matrix() - ComplexMatrix::Identity(2, 2))};
    CHECK(feasibility_error(low, problem) >= 1.0);

    // the multiplicity-two instance: any gamma with diagonal strictly inside
    // (1, 1.3) on the first block violates the sandwich
    FeasibilityProblem ref = reference_problem_3x3();
    for (double mu : {1.05, 1.15, 1.25}) {
        ComplexMatrix g = ComplexMatrix::Zero(3, 3);
        g(0, 0) = mu;
        g(1, 1) = mu;
        g(2, 2) = 1.45;
        CHECK(feasibility_error(HermitianMatrix(g), ref) > 1e-3);
    }
}

TEST_CASE("solve on the 5x5 instance reproduces the published gamma") {
    const auto inst = refdata::example_5x5();
    EigenBasis basis = build_eigenbasis(
        inst.a11, manual_spectrum({{0.125, 1}, {0.0625, 2}, {0.2, 2}}));
    basis = align_to_reference(basis, inst.v_ref);
    auto problem = build_problem(basis, inst.a11, inst.a12);
    auto outcome = solve(problem);
    REQUIRE(outcome.status == SolveStatus::Feasible);
    CHECK(outcome.residual <= 1e-10);
    CHECK(max_abs_diff(outcome.gamma->matrix(), inst.gamma_ref) <= 1e-2);
}

TEST_CASE("solve on the 7x7 instance reproduces the published gamma") {
    const auto inst = refdata::example_7x7();
    EigenBasis basis = build_eigenbasis(
        inst.a11, manual_spectrum({{0.1, 1}, {0.2, 1}, {0.3, 2}, {0.4, 3}}));
    basis = align_to_reference(basis, inst.v_ref);
    auto problem = build_problem(basis, inst.a11, inst.a12);
    auto outcome = solve(problem);
    REQUIRE(outcome.status == SolveStatus::Feasible);
    CHECK(max_abs_diff(outcome.gamma->matrix(), inst.gamma_ref) <= 1e-2);
}

TEST_CASE("solve detects a deeply infeasible sandwich quickly") {
    // p far above the closed-form bound but still a contraction
    const auto inst = refdata::boundary_pair(0.2);
    EigenBasis basis = build_eigenbasis(inst.a11, manual_spectrum({{0.5, 1}, {0.3, 1}}));
    auto problem = build_problem(basis, inst.a11, inst.a12);
    SolverConfig config;
    auto outcome = solve(problem, config);
    CHECK(outcome.status == SolveStatus::Stalled);
    CHECK(outcome.iterations <= 2 * config.stall_window);
    CHECK(outcome.residual > 1e-3);
}

TEST_CASE("solve is deterministic") {
    FeasibilityProblem problem = reference_problem_3x3();
    auto first = solve(problem);
    auto second = solve(problem);
    CHECK(first.status == second.status);
    CHECK(first.iterations == second.iterations);
    REQUIRE(first.error_history.size() == second.error_history.size());
    for (std::size_t i = 0; i < first.error_history.size(); ++i) {
        CHECK(first.error_history[i].error == second.error_history[i].error);
    }
}

TEST_CASE("Fejer monotonicity on sandwiched feasible instances") {
    auto gen = rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        BlockStructure blocks{{2, 2}};
        // gamma* block-diagonal PSD, Y = gamma* - PSD, X = gamma* + PSD
        HermitianMatrix star = project_block_diagonal_psd(random_hermitian(4, gen), blocks);
        ComplexMatrix g1 = random_complex(4, 4, gen);
        ComplexMatrix g2 = random_complex(4, 4, gen);
        HermitianMatrix y(star.matrix() - 0.3 * (g1 * g1.adjoint()));
        HermitianMatrix x(star.matrix() + 0.3 * (g2 * g2.adjoint()));
        FeasibilityProblem problem{x, y, blocks};

        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        SolverConfig config;
        config.max_iter = 300;
        solve(problem, config,
              [&](std::size_t, const HermitianMatrix& gamma, double) {
                  const double dist = (gamma.matrix() - star.matrix()).norm();
                  if (dist > prev + 1e-9) monotone = false;
                  prev = dist;
              });
        CHECK(monotone);
    }
}

TEST_CASE("error history is subsampled after ten thousand iterations") {
    // an infeasible instance that keeps iterating: disable stall detection
    const auto inst = refdata::boundary_pair(0.0943);
    EigenBasis basis = build_eigenbasis(inst.a11, manual_spectrum({{0.5, 1}, {0.3, 1}}));
    auto problem = build_problem(basis, inst.a11, inst.a12);
    SolverConfig config;
    config.max_iter = 10050;
    config.stall_rel_change = 0.0;
    auto outcome = solve(problem, config);
    CHECK(outcome.status == SolveStatus::MaxIterReached);
    REQUIRE(outcome.error_history.size() == 10005);
    CHECK(outcome.error_history[10000].iteration == 10010);
    CHECK(outcome.error_history.back().iteration == 10050);
}

}  // TEST_SUITE
