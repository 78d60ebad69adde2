#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace t20 {

/// Environment variable naming a profile store directory.
inline constexpr const char* kProfileStoreEnv = "T20_PROFILE_STORE";

/// Runs one t20ctl command line. Results go to `out` (or the --out file),
/// diagnostics to `err`. Exit codes: 0 success, 1 runtime failure, 2 invalid
/// input (usage or field errors), 3 infeasible scenario.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace t20
