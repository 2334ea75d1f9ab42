#pragma once

#include <iosfwd>

namespace hbref {

/// Command-line driver.  Subcommands: init, refine, check, overlay, basis,
/// complexity, render.  Returns 0 on success, 1 on domain errors or failed
/// checks, 2 on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hbref
