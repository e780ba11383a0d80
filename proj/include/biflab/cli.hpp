#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biflab {

/// Exit codes: 0 success, 1 usage error, 2 numerical failure (the error name
/// is written to the diagnostic stream).
int cli_dispatch(int argc, char** argv);
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biflab
