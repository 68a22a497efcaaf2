#pragma once

#include <string>
#include <vector>

namespace railsched::cli {

// Entry point behind the railsched binary; args excludes the program name.
// Exit codes: 0 success, 1 domain failure (infeasible model, capacity,
// malformed data), 2 usage error.
int run(const std::vector<std::string>& args);

} // namespace railsched::cli
