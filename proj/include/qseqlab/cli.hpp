#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qseqlab {

// One CLI invocation; args excludes the program name. Results and messages go
// to the given streams so tests can capture them. Exit codes: 0 ok, 1 usage,
// 2 spec parse, 3 resource cap.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qseqlab
