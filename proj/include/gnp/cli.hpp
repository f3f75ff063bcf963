#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gnp::cli {

/// Entry point behind the gnp binary. Exit codes: 0 success, 2 config
/// error, 3 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version_string();

}  // namespace gnp::cli
