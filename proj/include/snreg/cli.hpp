#pragma once

namespace snreg {

// Entry point behind the snreg binary: subcommands fit, simulate-size,
// simulate-power, critval, dq-test, empirical. Returns 0 on success, 2 on
// usage/configuration errors, 1 on runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace snreg
