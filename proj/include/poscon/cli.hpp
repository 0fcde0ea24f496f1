#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poscon {

/// Entry point shared by the binary and the tests.  Exit codes: 0 success
/// (decomposed / verified / all reference rows pass / feasible verdict),
/// 2 rejected, stalled, failed verification or infeasible verdict,
/// 1 I/O, parse or numerical errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poscon
