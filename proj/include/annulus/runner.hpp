#pragma once

#include <optional>
#include <string>

#include "annulus/config.hpp"

namespace annulus {

// Command-line overrides applied on top of a parsed config.
struct RunOverrides {
  std::optional<int> nodes;      // replaces both node counts
  std::optional<SeedSpec> seed;  // replaces the solver seed
};

void apply_overrides(ProblemConfig& cfg, const RunOverrides& overrides);

// Each command writes its artifacts under out_dir (created if missing),
// named <prefix>_*.  Returns the process exit code: 0 success, 1 numerical
// failure. Config errors throw ConfigError (mapped to exit 2 by the CLI).
int cmd_verify(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_solve(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_continue(const ProblemConfig& cfg, const std::string& out_dir);
int cmd_radial(const ProblemConfig& cfg, const std::string& out_dir);

}  // namespace annulus
