#pragma once

// Subcommand implementations behind the nlsctl CLI. Each returns the process
// exit code: 0 PASS, 1 FAIL. Configuration errors surface as Error with
// ConfigError or ParseError and map to exit code 2 in the caller.

#include "nlsctl/config.hpp"

#include <iosfwd>
#include <string>

namespace nlsctl {

struct RunContext {
  Config cfg;
  std::string out_dir;
  bool quiet = false;
  bool dry_run = false;
  std::ostream* out = nullptr;  ///< defaults to std::cout
};

int cmd_eigs(const RunContext& ctx);
int cmd_saturation(const RunContext& ctx);
int cmd_kappa_sweep(const RunContext& ctx);
int cmd_mu_check(const RunContext& ctx);
int cmd_moment_demo(const RunContext& ctx);
int cmd_linctrl(const RunContext& ctx);
int cmd_steer(const RunContext& ctx);
int cmd_dump_defaults(const RunContext& ctx);

/// Maps an error to the CLI exit code (2 for configuration and parse errors, 1 otherwise).
int exit_code_for(const std::exception& e);

}  // namespace nlsctl
