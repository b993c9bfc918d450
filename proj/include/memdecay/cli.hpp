#pragma once

#include <iosfwd>

namespace memdecay {

// Full command-line front end. Diagnostics go to err, data to out or to the
// path named by --output. Returns 0 on success, 1 on validation or I/O
// failures, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace memdecay
