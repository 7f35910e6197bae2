#ifndef SKYLISTEN_TOOLS_CLI_H_
#define SKYLISTEN_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace skylisten::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. "-" as a file argument means `in`/`out`.
int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace skylisten::cli

#endif  // SKYLISTEN_TOOLS_CLI_H_
