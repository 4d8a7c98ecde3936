#pragma once

#include <iosfwd>

namespace foq::cli {

// Exit codes: 0 success, 1 config or argument error, 2 runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace foq::cli
