#pragma once

#include <iosfwd>

namespace adcad {

/// Runs the command line `argv` (argv[0] is the program name). Returns 0 on
/// success, 1 on domain errors (bad data or configuration), 2 on usage
/// errors. Diagnostics go to `err`; human-readable results to `out`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adcad
