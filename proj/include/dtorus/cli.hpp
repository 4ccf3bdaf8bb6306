#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dtorus::cli {

/// args excludes the program name. Exit codes: 0 success, 2 solvability verdict failed, 1 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace dtorus::cli
