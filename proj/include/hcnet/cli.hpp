#ifndef HCNET_CLI_HPP
#define HCNET_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace hcnet {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hcnet

#endif  // HCNET_CLI_HPP
