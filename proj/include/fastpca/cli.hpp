#pragma once

#include <string>
#include <vector>

namespace fastpca {

// Full command-line front end; returns the process exit code.
// Exit codes: 0 ok, 2 input/parse error, 3 no usable gap, 4 tolerance
// failure, 5 loop-guard violation, 1 anything else.
int cli_main(const std::vector<std::string>& args);

}  // namespace fastpca
