#pragma once

#include <poscon/factor.hpp>
#include <poscon/feasibility.hpp>
#include <poscon/types.hpp>

#include <string>
#include <vector>

namespace poscon {

/// Raw data of the built-in reference instances.
namespace refdata {

/// (1/25) [[9, 3], [0, 16]].
ComplexMatrix intro_2x2();

/// A canonical-form instance [[A11, A12], [0, 0]] together with the
/// eigenvector choice its published run used.
struct BlockInstance {
    ComplexMatrix a11;
    ComplexMatrix a12;
    ComplexMatrix v_ref;     ///< published eigenbasis (empty when none)
    ComplexMatrix gamma_ref; ///< published solution (empty when none)
    RealVector d;            ///< eigenvalues in the published order
    BlockStructure blocks;

    ComplexMatrix assemble() const;  ///< [[A11, A12], [0, 0]]
};

/// 3 x 3 interior block with eigenvalues (0.15, 0.15, 0.2); A12 is built at
/// full precision from the exact contraction U with U D U* = A11 A11* + A12 A12*.
BlockInstance example_3x3();
/// The exact U of that construction.
ComplexMatrix example_3x3_u();
/// Published problem matrices for the same instance.
ComplexMatrix example_3x3_x_ref();
ComplexMatrix example_3x3_y_ref();

BlockInstance example_5x5();
BlockInstance example_7x7();

/// [[0.5, p], [0, 0.3]] (+) 0_2, the near-bound pair uses p = 0.09429 and 0.0943.
BlockInstance boundary_pair(double p);

}  // namespace refdata

struct ReferenceCheck {
    std::string label;
    bool passed = false;
    std::string detail;
};

struct ReferenceCaseResult {
    std::string name;
    std::string note;
    std::vector<ReferenceCheck> checks;

    bool passed() const;
};

const std::vector<std::string>& reference_case_names();

/// Run one built-in instance and compare against its published values.
ReferenceCaseResult run_reference_case(const std::string& name,
                                       const DecomposeConfig& config = {});

std::vector<ReferenceCaseResult> run_all_reference_cases(const DecomposeConfig& config = {});

}  // namespace poscon
