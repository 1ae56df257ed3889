#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace weylcheck {

/// Command-line driver. `args` excludes the program name. Returns 0 when
/// every check passes, 1 on a failed verification and 2 on usage or parse
/// errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weylcheck
