#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace mw {

// Batch frontend. Exit codes: 0 all checks passed, 1 some task or soundness
// check was falsified, 2 usage or infrastructure error.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace mw
