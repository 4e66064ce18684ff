#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cgcn {

// Entry point for the cluster_gcn tool. `args` excludes the program name.
// Returns 0 on success, 1 on data or numeric errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgcn
