#pragma once

namespace ym {

// Full command-line entry point (validate / run / resume). Returns the
// process exit code: 0 success, 1 invalid input, 2 runtime failure.
int cli_main(int argc, char** argv);

}  // namespace ym
