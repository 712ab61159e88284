#pragma once

#include <iosfwd>

namespace sparsenle {

/// Entry point of the sparsenle command-line tool. Exit codes: 0 success,
/// 1 usage error, 2 domain failure (infeasible parameters, too few decoded
/// samples, inconsistent secret, no collisions, violated checks).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsenle
