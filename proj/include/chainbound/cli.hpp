#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chainbound::cli {

// Exit codes: 0 success, 2 validation, 3 domain, 4 I/O.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace chainbound::cli
