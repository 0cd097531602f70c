#include "nlsctl/commands.hpp"
#include "nlsctl/error.hpp"
#include "nlsctl/textio.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <map>
#include <optional>

using namespace nlsctl;

int main(int argc, char** argv) {
  CLI::App app{"Spectral-Galerkin controllability experiments for the bilinear Schrodinger equation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool quiet = false, dry_run = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_option("--seed", seed, "random seed (overrides run.seed)");
  app.add_option("--set", overrides, "section.key=value override, repeatable");
  app.add_flag("--quiet", quiet, "only print the verdict line");
  app.add_flag("--dry-run", dry_run, "validate the configuration and print the plan");

  int k_max = 0;
  std::vector<double> range;
  std::string mu;

  std::map<std::string, std::function<int(const RunContext&)>> commands;
  auto add = [&](const std::string& name, const std::string& help, int (*fn)(const RunContext&)) {
    commands[name] = fn;
    return app.add_subcommand(name, help);
  };
  add("eigs", "eigenpairs and asymptotic remainders", cmd_eigs);
  add("saturation", "saturation ladder ranks", cmd_saturation);
  auto* sweep = add("kappa-sweep", "eigen-tracks in kappa and their zero crossings", cmd_kappa_sweep);
  sweep->add_option("--k-max", k_max, "number of tracks");
  sweep->add_option("--range", range, "kappa interval lo hi")->expected(2);
  auto* muc = add("mu-check", "coupling lower bound for a profile", cmd_mu_check);
  muc->add_option("--mu", mu, "profile name or file:<path>");
  add("moment-demo", "moment-problem control for a random target", cmd_moment_demo);
  add("linctrl", "linearized exact control for a random tangent target", cmd_linctrl);
  add("steer", "Newton steering between states near the ground state", cmd_steer);
  auto* config = app.add_subcommand("config", "configuration utilities");
  config->require_subcommand(1);
  config->add_subcommand("dump-defaults", "print every key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunContext ctx;
    if (!config_path.empty()) ctx.cfg.load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects section.key=value, got '" + kv + "'");
      ctx.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) ctx.cfg.set("run.seed", std::to_string(*seed));
    if (!out_dir.empty()) ctx.cfg.set("run.out", out_dir);
    if (k_max > 0) ctx.cfg.set("kappa_sweep.k_max", std::to_string(k_max));
    if (range.size() == 2) {
      ctx.cfg.set("kappa_sweep.kappa_lo", textio::format_double(range[0]));
      ctx.cfg.set("kappa_sweep.kappa_hi", textio::format_double(range[1]));
    }
    if (!mu.empty()) ctx.cfg.set("mu_check.mu", mu);
    ctx.out_dir = ctx.cfg.get_string("run.out");
    ctx.quiet = quiet;
    ctx.dry_run = dry_run;

    if (config->parsed()) return cmd_dump_defaults(ctx);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(ctx);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
