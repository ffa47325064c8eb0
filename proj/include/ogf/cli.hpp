#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ogf {

/// Entry point of the `ogf` command line tool. `args` excludes the program
/// name. Exit codes: 0 feasible, 2 infeasible, 1 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ogf
