#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace npw::cli {

/// Entry point shared by the npwray binary and the test suites.
/// args excludes the program name, e.g. {"link", "--config", "cfg"}.
/// Returns a process exit code (see errors.hpp).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace npw::cli
