#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcount::cli {

// Runs one CLI invocation. args excludes the program name. Results go to
// `out`, diagnostics to `err`. Returns 0 on success, 1 on runtime failure,
// 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcount::cli
