#include "nlsctl/steering.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/kernels.hpp"
#include "nlsctl/linear_control.hpp"

#include "json.hpp"

#include <cmath>
#include <ostream>

namespace nlsctl {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "CONVERGED";
    case Verdict::Stalled: return "STALLED";
    case Verdict::Diverged: return "DIVERGED";
  }
  return "UNKNOWN";
}

namespace {

void check_unit(const ModalState& s, const char* name) {
  const double nrm = s.coeffs.norm();
  if (std::abs(nrm - 1.0) > 1e-10)
    throw Error(ErrorCode::NotNormalized, std::string(name) + " has L2 norm " + std::to_string(nrm));
}

ControlSignal control_from_bins(const Eigen::VectorXd& x, double T, int bins, int q) {
  Eigen::MatrixXd v(bins, q);
  for (int c = 0; c < q; ++c) v.col(c) = x.segment(c * bins, bins);
  return ControlSignal::uniform(T, v);
}

Eigen::VectorXd bins_from_control(const ControlSignal& u) {
  Eigen::VectorXd x(u.intervals() * u.channels());
  for (int c = 0; c < u.channels(); ++c) x.segment(c * u.intervals(), u.intervals()) = u.values.col(c);
  return x;
}

}  // namespace

SteeringReport newton_steer(const ModalState& psi0, const ModalState& psi1, const ProblemParams& P,
                            const SteeringOptions& opts) {
  check_unit(psi0, "psi0");
  check_unit(psi1, "psi1");
  const int n = P.N(), q = P.q(), bins = opts.bins;
  if (bins < 1 || P.steps() % bins != 0)
    throw Error(ErrorCode::TimeGridMismatch, "bins must divide the step count");

  SteeringReport rep;
  for (const auto* s : {&psi0, &psi1}) {
    const double d = sobolev_norm(s->resized(n) - P.phi, 3.0);
    if (d > opts.delta)
      rep.notes.push_back("endpoint at H^3 distance " + std::to_string(d) + " exceeds delta " +
                          std::to_string(opts.delta));
  }

  const Eigen::VectorXd D = h3_row_weights(n);
  const Eigen::VectorXd target = to_real(psi1.resized(n));
  ControlSignal u = stationary_control(P, bins);
  Trajectory traj = propagate_nls(psi0, u, P);

  auto record = [&](const Trajectory& tr, const ControlSignal& c) {
    rep.residual_history.push_back(sobolev_norm(tr.terminal() - psi1.resized(n), 3.0));
    rep.control_norm_history.push_back(c.l2_norm());
    rep.norm_drift_history.push_back(std::abs(tr.terminal().coeffs.norm() - 1.0));
  };
  record(traj, u);

  int growth = 0;
  for (int it = 0;; ++it) {
    const double res = rep.residual_history.back();
    if (!std::isfinite(res)) {
      rep.verdict = Verdict::Diverged;
      break;
    }
    if (res < opts.tol) {
      rep.verdict = Verdict::Converged;
      break;
    }
    if (it >= opts.max_iter) {
      rep.verdict = Verdict::Stalled;
      break;
    }

    const Eigen::MatrixXd J = kernels::nls_jacobian(traj, P, bins);
    const Eigen::VectorXd end = to_real(traj.terminal());
    Eigen::VectorXd r = target - end;
    // Only the part tangent to the sphere at psi(T) is reachable to first order.
    const Eigen::VectorXd rt = r - (r.dot(end) / end.squaredNorm()) * end;
    const Eigen::VectorXd dx = truncated_solve(D.asDiagonal() * J, D.asDiagonal() * r, opts.rtol);
    const double lin_res = (D.asDiagonal() * (J * dx - rt)).norm() / (D.asDiagonal() * rt).norm();
    if (lin_res > opts.deficiency_tol)
      throw Error(ErrorCode::ControlDeficient,
                  "linearized solve leaves relative residual " + std::to_string(lin_res));

    const Eigen::VectorXd x = bins_from_control(u);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
      const ControlSignal trial = control_from_bins(x + step * dx, P.T(), bins, q);
      try {
        Trajectory tt = propagate_nls(psi0, trial, P);
        const double tr_res = sobolev_norm(tt.terminal() - psi1.resized(n), 3.0);
        if (std::isfinite(tr_res) && tr_res < res) {
          u = trial;
          traj = std::move(tt);
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LocalExistenceExceeded) throw;
      }
    }
    if (!accepted) {
      rep.notes.push_back("no decrease after " + std::to_string(opts.max_halvings) + " halvings");
      rep.verdict = Verdict::Diverged;
      break;
    }
    ++rep.iterations;
    record(traj, u);
    const std::size_t m = rep.residual_history.size();
    growth = rep.residual_history[m - 1] > rep.residual_history[m - 2] ? growth + 1 : 0;
    if (growth >= 3) {
      rep.verdict = Verdict::Diverged;
      break;
    }
  }
  rep.final_control = u;

  const auto& h = rep.residual_history;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i - 1] > 0.0 && h[i - 1] < 1e-2) rep.contraction_constant = std::max(rep.contraction_constant, h[i] / (h[i - 1] * h[i - 1]));
  return rep;
}

ProblemParams extended_horizon(const ProblemParams& P, int factor) {
  ProblemSetup s = P.setup;
  s.T *= factor;
  s.steps *= factor;
  return make_params(s);
}

TwoLegResult two_leg_steer(const ModalState& psi0, const ModalState& psi1, const ProblemParams& P,
                           const SteeringOptions& opts) {
  TwoLegResult out;
  const ModalState phi = P.phi;
  out.leg1 = newton_steer(phi, psi0.resized(P.N()).conj(), P, opts);
  if (out.leg1.verdict != Verdict::Converged) {
    out.failed_leg = "leg 1 (phi -> conj(psi0)): " + std::string(to_string(out.leg1.verdict));
    return out;
  }
  out.leg2 = newton_steer(phi, psi1, P, opts);
  if (out.leg2.verdict != Verdict::Converged) {
    out.failed_leg = "leg 2 (phi -> psi1): " + std::string(to_string(out.leg2.verdict));
    return out;
  }
  out.control = out.leg1.final_control.reversed().concatenate(out.leg2.final_control);
  const ProblemParams P2 = extended_horizon(P, 2);
  const Trajectory tr = propagate_nls(psi0, out.control, P2);
  out.end_to_end_residual = sobolev_norm(tr.terminal() - psi1.resized(P.N()), 3.0);
  out.converged = out.end_to_end_residual < 10.0 * opts.tol;
  if (!out.converged) out.failed_leg = "concatenation";
  return out;
}

double reverify(const ControlSignal& u, const ModalState& psi0, const ModalState& psi1, const ProblemParams& P,
                int factor) {
  const Trajectory tr = propagate_nls(psi0, u, P, P.steps() * factor);
  return sobolev_norm(tr.terminal() - psi1.resized(P.N()), 3.0);
}

GradientCheck gradient_check(const ModalState& psi0, const ControlSignal& u_hat, const ControlSignal& v,
                             const ProblemParams& P, std::vector<double> eps_ladder) {
  GradientCheck g;
  const Trajectory base = propagate_nls(psi0, u_hat, P);
  const ModalState xi = linearize(base, v, P);
  double scale = sobolev_norm(base.terminal(), 3.0);
  for (double eps : eps_ladder) {
    for (int shrink = 0;; ++shrink) {
      try {
        const ModalState pe = propagate_nls(psi0, u_hat + eps * v, P).terminal();
        const ModalState rem = pe - base.terminal() - cplx(eps) * xi;
        g.eps.push_back(eps);
        g.remainders.push_back(sobolev_norm(rem, 3.0));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LocalExistenceExceeded || shrink >= 8) throw;
        eps *= 0.1;
      }
    }
  }
  g.exact = true;
  for (double r : g.remainders)
    if (r > 1e-13 * std::max(1.0, scale)) g.exact = false;
  if (g.exact || g.eps.size() < 2) {
    g.slope = INFINITY;
    return g;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(g.eps.size());
  for (std::size_t i = 0; i < g.eps.size(); ++i) {
    const double x = std::log(g.eps[i]), y = std::log(std::max(g.remainders[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  g.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return g;
}

ModalState perturbed_ground_state(const ProblemParams& P, const ModalState& direction, double radius) {
  const double d3 = sobolev_norm(direction, 3.0);
  if (!(d3 > 0.0)) return P.phi;
  ModalState s = P.phi + cplx(radius / d3) * direction.resized(P.N());
  s *= 1.0 / s.coeffs.norm();
  return s;
}

void write_report_json(std::ostream& os, const SteeringReport& r, const std::string& control_file) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(r.verdict);
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual();
  j["residual_history"] = r.residual_history;
  j["control_norm_history"] = r.control_norm_history;
  j["norm_drift_history"] = r.norm_drift_history;
  j["contraction_constant"] = r.contraction_constant;
  j["notes"] = r.notes;
  j["control_file"] = control_file;
  os << j.dump(2) << '\n';
}

}  // namespace nlsctl
