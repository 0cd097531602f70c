#pragma once

#include "nlsctl/dynamics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsctl {

enum class Verdict { Converged, Stalled, Diverged };
const char* to_string(Verdict v);

struct SteeringOptions {
  double tol = 1e-8;     ///< H^3 terminal residual
  int max_iter = 6;
  int bins = 64;         ///< control intervals per channel; must divide the step count
  double delta = 1e-2;   ///< advisory radius around phi in H^3
  double rtol = 1e-10;   ///< pseudo-inverse cutoff of the Newton solve
  int max_halvings = 4;
  double deficiency_tol = 1e-6;
};

struct SteeringReport {
  int iterations = 0;
  std::vector<double> residual_history;      ///< H^3 distance to the target per iterate
  std::vector<double> control_norm_history;  ///< L^2 norm of each iterate's control
  std::vector<double> norm_drift_history;    ///< | ||psi(T)|| - 1 | per iterate
  Verdict verdict = Verdict::Stalled;
  ControlSignal final_control;
  std::vector<std::string> notes;
  /// max over late iterations of r_{n+1} / r_n^2; 0 when fewer than two steps.
  double contraction_constant = 0.0;

  double final_residual() const { return residual_history.empty() ? INFINITY : residual_history.back(); }
};

/// Newton iteration on the bin values of u, starting from the stationary
/// control, with exact re-linearization each step and step halving.
SteeringReport newton_steer(const ModalState& psi0, const ModalState& psi1, const ProblemParams& params,
                            const SteeringOptions& opts = {});

struct TwoLegResult {
  ControlSignal control;  ///< over [0, 2T]
  SteeringReport leg1;    ///< phi -> conj(psi0)
  SteeringReport leg2;    ///< phi -> psi1
  double end_to_end_residual = INFINITY;
  bool converged = false;
  std::string failed_leg;
};

/// psi0 -> phi by the time-reversed leg-one control, then phi -> psi1.
TwoLegResult two_leg_steer(const ModalState& psi0, const ModalState& psi1, const ProblemParams& params,
                           const SteeringOptions& opts = {});

/// Params with horizon and step count scaled by `factor` (same step size).
ProblemParams extended_horizon(const ProblemParams& params, int factor);

/// H^3 residual of re-propagating `u` from psi0 with `factor` times more steps.
double reverify(const ControlSignal& u, const ModalState& psi0, const ModalState& psi1,
                const ProblemParams& params, int factor = 2);

struct GradientCheck {
  std::vector<double> eps;
  std::vector<double> remainders;  ///< ||Psi(u+eps v) - Psi(u) - eps xi(T)||_3
  double slope = 0.0;
  bool exact = false;  ///< remainders at roundoff level
};

GradientCheck gradient_check(const ModalState& psi0, const ControlSignal& u_hat, const ControlSignal& v,
                             const ProblemParams& params, std::vector<double> eps_ladder);

/// Normalized phi + perturbation; the perturbation is rescaled to H^3 norm `radius`.
ModalState perturbed_ground_state(const ProblemParams& params, const ModalState& direction, double radius);

void write_report_json(std::ostream& os, const SteeringReport& r, const std::string& control_file);

}  // namespace nlsctl
