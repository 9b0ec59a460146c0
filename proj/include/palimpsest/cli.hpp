#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace palimpsest {

// Arguments exclude the program name. Returns 0 on success, 1 on usage
// errors, 2 on data errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace palimpsest
