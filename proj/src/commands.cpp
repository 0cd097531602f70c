#include "nlsctl/commands.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/linear_control.hpp"
#include "nlsctl/moments.hpp"
#include "nlsctl/sampling.hpp"
#include "nlsctl/saturation.hpp"
#include "nlsctl/steering.hpp"
#include "nlsctl/textio.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace nlsctl {

namespace fs = std::filesystem;
using textio::format_double;

namespace {

std::ostream& out(const RunContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

std::string path_in(const RunContext& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return (fs::path(ctx.out_dir) / name).string();
}

std::ofstream open_out(const RunContext& ctx, const std::string& name) {
  const std::string p = path_in(ctx, name);
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + p + "'");
  return f;
}

void info(const RunContext& ctx, const std::string& line) {
  if (!ctx.quiet) out(ctx) << line << '\n';
}

int verdict(const RunContext& ctx, const std::string& cmd, bool pass, const std::string& detail) {
  out(ctx) << cmd << ": " << (pass ? "PASS" : "FAIL") << (detail.empty() ? "" : " (" + detail + ")") << '\n';
  return pass ? 0 : 1;
}

// Prints the plan and returns true when the command should stop here.
bool plan(const RunContext& ctx, const std::string& cmd, const std::vector<std::string>& sections,
          const std::vector<std::string>& outputs) {
  if (!ctx.dry_run) return false;
  out(ctx) << "plan: " << cmd << '\n';
  for (const auto& sec : sections) {
    const auto& keys = ctx.cfg.sections().at(sec);
    for (const auto& [k, e] : keys) out(ctx) << "  " << sec << '.' << k << " = " << e.value << '\n';
  }
  for (const auto& o : outputs) out(ctx) << "  output " << (fs::path(ctx.out_dir) / o).string() << '\n';
  return true;
}

ProblemParams params_from(const RunContext& ctx) {
  const ProblemParams P = make_params(problem_setup(ctx.cfg));
  for (const auto& w : P.warnings) info(ctx, "warning: " + w);
  return P;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e))
    return (err->code() == ErrorCode::ConfigError || err->code() == ErrorCode::ParseError) ? 2 : 1;
  return 1;
}

int cmd_dump_defaults(const RunContext& ctx) {
  Config().dump(out(ctx));
  return 0;
}

int cmd_eigs(const RunContext& ctx) {
  // Validate before planning so dry runs catch bad profiles too.
  const ProblemSetup setup = problem_setup(ctx.cfg);
  if (plan(ctx, "eigs", {"problem", "eigs"}, {"eigs.csv"})) return 0;
  const int M = setup.grid > 0 ? setup.grid : 4 * setup.N;
  const SpectralOperator op = build_operator(setup.V.sample(M), setup.N);
  const OperatorCheck chk = check_operator(op);
  const AsymptoticsReport asym = check_asymptotics(op);

  auto f = open_out(ctx, "eigs.csv");
  textio::CsvWriter csv(f, {"k", "lambda", "residual", "r_k"});
  for (int k = 1; k <= op.trusted_count(); ++k)
    csv.row({std::to_string(k), format_double(op.eigenvalue(k)), format_double(chk.residuals(k - 1)),
             format_double(asym.remainders(k - 1))});

  const bool ok = chk.ok(ctx.cfg.get_double("eigs.orth_tol"), ctx.cfg.get_double("eigs.residual_tol"));
  const double total = asym.partial_sums(asym.partial_sums.size() - 1);
  info(ctx, "sum r_k^2 over trusted range = " + format_double(total) + "; " + asym.note);
  return verdict(ctx, "eigs", ok && asym.pass,
                 "orthonormality " + format_double(chk.orthonormality_error) + ", asymptotics " +
                     (asym.pass ? "plateau" : "no plateau"));
}

int cmd_saturation(const RunContext& ctx) {
  const std::string start = ctx.cfg.get_string("saturation.start");
  if (start != "q" && start != "phi12")
    throw Error(ErrorCode::ConfigError, "saturation.start must be 'q' or 'phi12'");
  const ProblemSetup setup = problem_setup(ctx.cfg);
  if (plan(ctx, "saturation", {"problem", "saturation"}, {"saturation.csv"})) return 0;
  const ProblemParams P = params_from(ctx);
  const int j_max = static_cast<int>(ctx.cfg.get_int("saturation.j_max"));
  const double tol = ctx.cfg.get_double("saturation.tol");

  SaturationLadder L;
  if (start == "q") {
    L = build_ladder(P, j_max, tol);
  } else {
    Eigen::MatrixXd l0 = Eigen::MatrixXd::Zero(2 * P.N(), 2);
    l0(0, 0) = 1.0;
    l0(1, 1) = 1.0;
    L = build_ladder(P, l0, j_max, tol);
  }
  const SaturationVerdict v = saturation_verdict(L, P, tol);

  auto f = open_out(ctx, "saturation.csv");
  textio::CsvWriter csv(f, {"level", "rank"});
  for (std::size_t j = 0; j < L.ranks.size(); ++j) csv.row({std::to_string(j), std::to_string(L.ranks[j])});
  if (v.missed) {
    auto m = open_out(ctx, "saturation_missed.txt");
    textio::write_modal(m, *v.missed);
  }
  return verdict(ctx, "saturation", v.saturating,
                 "tangent dimension " + std::to_string(v.dimension) + "/" + std::to_string(v.target) + ", codim " +
                     std::to_string(v.codim) + (v.partial ? ", PARTIAL" : ""));
}

int cmd_kappa_sweep(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  if (plan(ctx, "kappa-sweep", {"kappa_sweep"}, {"kappa_sweep.csv", "kappa_crossings.csv"})) return 0;
  const int k_max = static_cast<int>(c.get_int("kappa_sweep.k_max"));
  const KappaSweepResult R =
      kappa_sweep(k_max, c.get_double("kappa_sweep.kappa_lo"), c.get_double("kappa_sweep.kappa_hi"),
                  static_cast<int>(c.get_int("kappa_sweep.samples")), static_cast<int>(c.get_int("kappa_sweep.N")),
                  c.get_double("kappa_sweep.fd_step"), c.get_double("kappa_sweep.bisect_tol"));

  auto f = open_out(ctx, "kappa_sweep.csv");
  textio::CsvWriter csv(f, {"kappa", "k", "lambda", "dlambda_fd", "dlambda_hf"});
  for (std::size_t i = 0; i < R.kappa_grid.size(); ++i)
    for (int k = 0; k < k_max; ++k)
      csv.row({format_double(R.kappa_grid[i]), std::to_string(k + 1), format_double(R.lambda(i, k)),
               format_double(R.dlambda_fd(i, k)), format_double(R.dlambda_hf(i, k))});
  auto g = open_out(ctx, "kappa_crossings.csv");
  textio::CsvWriter cr(g, {"k", "kappa_star", "bisection_residual"});
  bool nonpositive = true;
  for (const auto& x : R.crossings) {
    cr.row({std::to_string(x.k), format_double(x.kappa_star), format_double(x.residual)});
    if (x.kappa_star > 1e-12) nonpositive = false;
  }
  info(ctx, std::to_string(R.crossings.size()) + " crossings; max Hellmann-Feynman relative error " +
                format_double(R.max_hf_rel_error));
  const bool pass = R.strictly_increasing && R.max_hf_rel_error < 1e-5 && nonpositive;
  return verdict(ctx, "kappa-sweep", pass,
                 std::string(R.strictly_increasing ? "tracks increasing" : "non-monotone track") + ", " +
                     std::to_string(R.crossings.size()) + " crossings");
}

int cmd_mu_check(const RunContext& ctx) {
  const ProblemSetup setup = problem_setup(ctx.cfg);
  const Profile mu = resolve_profile(ctx.cfg.get_string("mu_check.mu"));
  if (plan(ctx, "mu-check", {"problem", "mu_check"}, {"mu_check.csv"})) return 0;
  const int M = setup.grid > 0 ? setup.grid : 4 * setup.N;
  const SpectralOperator op = build_operator(setup.V.sample(M), setup.N);
  const int K = static_cast<int>(ctx.cfg.get_int("mu_check.K"));
  if (K < 1 || K > op.trusted_count())
    throw Error(ErrorCode::ConfigError, "mu_check.K must lie in 1.." + std::to_string(op.trusted_count()));
  const MuBoundReport r = verify_mu_bound(mu.sample(M), op, K, ctx.cfg.get_double("mu_check.zero_tol"));

  auto f = open_out(ctx, "mu_check.csv");
  textio::CsvWriter csv(f, {"k", "coefficient", "scaled"});
  for (const auto& row : r.table)
    csv.row({std::to_string(row.k), format_double(row.coefficient), format_double(row.scaled)});
  std::string detail = "c_est " + format_double(r.c_est) + " at k=" + std::to_string(r.argmin_k);
  if (r.zero_at) detail = "vanishing coefficient at k=" + std::to_string(*r.zero_at);
  return verdict(ctx, "mu-check", r.pass, detail);
}

int cmd_moment_demo(const RunContext& ctx) {
  problem_setup(ctx.cfg);
  const Profile mu = resolve_profile(ctx.cfg.get_string("moment_demo.mu"));
  if (plan(ctx, "moment-demo", {"problem", "moment_demo", "run"}, {"moment_demo.csv", "moment_demo_control.txt"}))
    return 0;
  const ProblemParams P = without_w(params_from(ctx));
  const int K = static_cast<int>(ctx.cfg.get_int("moment_demo.K"));
  if (K < 1 || K > P.op.trusted_count())
    throw Error(ErrorCode::ConfigError, "moment_demo.K must lie in 1.." + std::to_string(P.op.trusted_count()));
  std::mt19937_64 rng(ctx.cfg.seed());
  const ModalState target = random_tangent(P, K, ctx.cfg.get_double("moment_demo.target_h3"), rng);

  const MomentSpec spec = moments_from_target(target, P.op, mu.sample(P.M), P.T(), K);
  const MomentSolution sol =
      solve_moment_problem(spec, static_cast<int>(ctx.cfg.get_int("moment_demo.m_ctrl")),
                           ctx.cfg.get_double("moment_demo.ridge"));
  const SingleDirectionResult sd = single_direction_control(
      target, P, mu, static_cast<int>(ctx.cfg.get_int("moment_demo.m_ctrl")), ctx.cfg.get_double("moment_demo.ridge"));

  auto f = open_out(ctx, "moment_demo.csv");
  textio::CsvWriter csv(f, {"k", "frequency", "target_re", "target_im", "residual"});
  for (int k = 0; k < K; ++k)
    csv.row({std::to_string(k + 1), format_double(spec.frequencies(k)), format_double(spec.targets(k).real()),
             format_double(spec.targets(k).imag()), format_double(sol.residuals(k))});
  textio::save_control(path_in(ctx, "moment_demo_control.txt"), sd.u);

  const double max_res = sol.residuals.maxCoeff();
  const bool pass = max_res < 1e-8 && sd.terminal_error < ctx.cfg.get_double("moment_demo.tol");
  if (sd.tail_ignored) info(ctx, "TAIL_IGNORED: target norm " + format_double(sd.tail_norm) + " above trusted range");
  return verdict(ctx, "moment-demo", pass,
                 "max moment residual " + format_double(max_res) + ", terminal H^3 error " +
                     format_double(sd.terminal_error));
}

int cmd_linctrl(const RunContext& ctx) {
  problem_setup(ctx.cfg);
  const std::string warm = ctx.cfg.get_string("linctrl.warm_start_mu");
  std::optional<Profile> warm_mu;
  if (!warm.empty()) warm_mu = resolve_profile(warm);
  if (plan(ctx, "linctrl", {"problem", "linctrl", "run"}, {"linctrl_gram.txt", "linctrl_control.txt"})) return 0;
  const ProblemParams P = params_from(ctx);
  std::mt19937_64 rng(ctx.cfg.seed());
  const ModalState target = random_tangent(P, P.N(), ctx.cfg.get_double("linctrl.target_h3"), rng);

  LinearControlOptions opts;
  opts.residual_tol = ctx.cfg.get_double("linctrl.residual_tol");
  opts.throw_on_deficient = false;
  opts.warm_start_mu = warm_mu;
  const LinearControlResult r =
      solve_linearized_control(target, P, static_cast<int>(ctx.cfg.get_int("linctrl.basis_size")), opts);

  auto f = open_out(ctx, "linctrl_gram.txt");
  write_gram_report(f, r.report);
  textio::save_control(path_in(ctx, "linctrl_control.txt"), r.v);
  if (r.deficient) {
    auto g = open_out(ctx, "linctrl_unreachable.txt");
    textio::write_modal(g, r.unreachable);
  }
  return verdict(ctx, "linctrl", !r.deficient,
                 std::string(r.deficient ? "CONTROL_DEFICIENT, " : "") + "relative residual " +
                     format_double(r.report.residual) + ", sigma_min " + format_double(r.report.sigma_min));
}

int cmd_steer(const RunContext& ctx) {
  problem_setup(ctx.cfg);
  const bool two_leg = ctx.cfg.get_bool("steer.two_leg");
  std::vector<std::string> outputs = {"steer.json", "steer_control.txt"};
  if (two_leg) outputs.insert(outputs.end(), {"steer_two_leg.json", "steer_two_leg_control.txt"});
  if (plan(ctx, "steer", {"problem", "steer", "run"}, outputs)) return 0;
  const ProblemParams P = params_from(ctx);

  std::mt19937_64 rng(ctx.cfg.seed());
  const double radius = ctx.cfg.get_double("steer.radius");
  auto endpoint = [&](const std::string& key) {
    const std::string file = ctx.cfg.get_string(key);
    return file.empty() ? random_unit_near_phi(P, radius, rng) : textio::load_modal(file).resized(P.N());
  };
  const ModalState psi0 = endpoint("steer.psi0");
  const ModalState psi1 = endpoint("steer.psi1");

  SteeringOptions opts;
  opts.tol = ctx.cfg.get_double("steer.tol");
  opts.max_iter = static_cast<int>(ctx.cfg.get_int("steer.max_iter"));
  opts.bins = static_cast<int>(ctx.cfg.get_int("steer.bins"));
  opts.delta = ctx.cfg.get_double("steer.delta");

  const SteeringReport rep = newton_steer(psi0, psi1, P, opts);
  textio::save_control(path_in(ctx, "steer_control.txt"), rep.final_control);
  {
    auto f = open_out(ctx, "steer.json");
    write_report_json(f, rep, "steer_control.txt");
  }
  for (const auto& n : rep.notes) info(ctx, "note: " + n);
  bool pass = rep.verdict == Verdict::Converged;
  std::string detail = std::string(to_string(rep.verdict)) + " in " + std::to_string(rep.iterations) +
                       " iterations, residual " + format_double(rep.final_residual());

  if (two_leg) {
    const TwoLegResult tl = two_leg_steer(psi0, psi1, P, opts);
    if (tl.converged) textio::save_control(path_in(ctx, "steer_two_leg_control.txt"), tl.control);
    auto f = open_out(ctx, "steer_two_leg.json");
    SteeringReport combined = tl.leg2;
    combined.notes.push_back("leg1 " + std::string(to_string(tl.leg1.verdict)) + ", end-to-end residual " +
                             format_double(tl.end_to_end_residual));
    if (!tl.failed_leg.empty()) combined.notes.push_back("failed: " + tl.failed_leg);
    write_report_json(f, combined, tl.converged ? "steer_two_leg_control.txt" : "");
    pass = pass && tl.converged;
    detail += "; two-leg " + std::string(tl.converged ? "CONVERGED" : "FAILED") + " end-to-end " +
              format_double(tl.end_to_end_residual);
  }
  return verdict(ctx, "steer", pass, detail);
}

}  // namespace nlsctl
