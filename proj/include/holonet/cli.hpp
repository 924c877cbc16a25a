#ifndef HOLONET_CLI_HPP
#define HOLONET_CLI_HPP

#include <iosfwd>

namespace holonet
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_numerical_failure = 2;

/// Environment variable naming the default output directory for `run`.
inline constexpr const char* output_dir_env = "HOLONET_OUT_DIR";

/*
 * holonet run --config <path> [--dt v] [--horizon v] [--penalty v] [--out dir]
 * holonet verify [--seed n]
 *
 * Exit codes: 0 success, 1 config error, 2 numerical failure.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace holonet

#endif // HOLONET_CLI_HPP
