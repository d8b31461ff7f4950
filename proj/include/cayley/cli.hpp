#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cayley {

// Exit codes: 0 success, 1 a mandatory verify check failed, 2 bad arguments
// or parameters. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:stop:step", inclusive of stop up to rounding; values are start + i*step.
std::vector<double> parse_theta_grid(const std::string& spec);

}  // namespace cayley
