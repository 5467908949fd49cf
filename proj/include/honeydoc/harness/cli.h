#ifndef HONEYDOC_HARNESS_CLI_H_
#define HONEYDOC_HARNESS_CLI_H_

#include <iosfwd>

namespace honeydoc::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConfig = 2;

// Subcommands: run, exp {sensibility,handover,latency,reduce}, dump-flows,
// validate. Returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_CLI_H_
