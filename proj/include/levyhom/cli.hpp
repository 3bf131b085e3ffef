#pragma once

#include <string>
#include <vector>

namespace levyhom {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_pass = 0, exit_runtime = 1, exit_config = 2 };

/// Entry point of `levy-homogenize`. Returns the process exit code:
/// 0 when every selected verdict passes, 1 on a failed verdict or runtime
/// error, 2 on a configuration error.
int run_cli(int argc, char** argv);

/// Runs one subcommand on an already-loaded config file path. Exposed for
/// tests; `overrides` mirror the --out/--seed/--workers flags (empty = unset).
int run_subcommand(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
                   const std::string& seed, const std::string& workers);

/// Subcommands understood by the front end.
const std::vector<std::string>& subcommand_names();

}  // namespace levyhom
