#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlchaos {

/// Command-line entry point; args exclude the program name.
/// Returns 0 on success, 1 on invalid input, 2 on numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlchaos
