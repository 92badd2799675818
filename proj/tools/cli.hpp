#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uwbnlos::cli {

// Runs one subcommand. Returns 0 on success, 2 on usage errors and 1 on data
// errors; diagnostics go to err, help text to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uwbnlos::cli
