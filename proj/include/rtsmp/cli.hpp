#pragma once

#include <iosfwd>

namespace rtsmp {

/// Exit codes: 0 success (SMP holds or not applicable), 1 violation, 2 input error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rtsmp
