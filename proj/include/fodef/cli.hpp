#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fodef {

// Runs one toolkit invocation.  `args` excludes the program name.
// Returns the process exit code: 0 when the checked property holds or
// the requested object was produced, 1 when a verdict is negative
// (not definable, witness found, budget violated), 2 on usage errors,
// 3 on input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fodef
