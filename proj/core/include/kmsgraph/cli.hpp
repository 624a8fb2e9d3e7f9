#pragma once

#include <iosfwd>

namespace kmsgraph {

// Command-line front end; returns the process exit code.
// 0 = success, 2 = input error, 3 = undecided verdict.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kmsgraph
