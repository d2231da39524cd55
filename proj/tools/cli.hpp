#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace wiretap {

// Exit codes: 0 result written (including negative results), 2 bad input or sizing, 3 size cap.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_file(const std::string& path);

}  // namespace wiretap
