#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace calibra::cli {

/// Entry point shared by the calibra binary and the tests.
/// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace calibra::cli
