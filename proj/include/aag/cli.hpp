#pragma once

#include <iosfwd>

namespace aag {

/// Entry point of the `aag` command. Returns 0 on success, 1 when a
/// document fails validation or analysis, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aag
