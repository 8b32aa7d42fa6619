#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wgkit {

// Runs one workbench subcommand. args excludes the program name.
// Returns 0 on success, 1 on a domain/data error, 2 on a usage/config error.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wgkit
