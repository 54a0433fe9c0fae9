#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace succession {

/// Runs one CLI invocation (arguments without the program name) and writes
/// results to `out`, warnings and errors to `err`.
///
/// Exit codes: 0 success; 2 usage or parse error; 3 impossible evidence;
/// 4 tolerance not met or hard limit exceeded; 5 no conditioned trials.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace succession
