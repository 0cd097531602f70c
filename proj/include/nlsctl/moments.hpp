#pragma once

// Exponential moment problem for the W-free linear equation driven through a
// single profile mu:  int_0^T exp(i w_k s) v(s) ds = m_k.

#include "nlsctl/dynamics.hpp"

#include <string>
#include <vector>

namespace nlsctl {

struct MomentSpec {
  Eigen::VectorXd frequencies;  ///< w_k = lambda_k - lambda, k = 1..K
  Eigen::VectorXcd targets;     ///< m_k
  double T = 1.0;

  int size() const { return static_cast<int>(frequencies.size()); }
  /// w_k - w_{k-1} for k = 2..K.
  Eigen::VectorXd gaps() const;
};

/// m_k = i exp(i w_k T) / <mu phi, phi_k> * int xi phi_k, k = 1..K.
/// Throws DivisionByStructuralZero if a coupling is below zero_tol.
MomentSpec moments_from_target(const ModalState& xi_target, const SpectralOperator& op, const SampledField& mu,
                               double T, int K, double zero_tol = 1e-12);

struct MomentSolution {
  ControlSignal v;              ///< scalar control on a uniform grid
  Eigen::VectorXd residuals;    ///< |computed moment - target| per k
  Eigen::VectorXd singular_values;
};

/// Minimal-norm piecewise-constant v on m_ctrl uniform intervals solving the
/// real and imaginary moment equations (the imaginary equation of a zero
/// frequency is dropped). ridge > 0 applies Tikhonov filtering.
/// Throws IllPosed when sigma_min < 1e-12 sigma_max.
MomentSolution solve_moment_problem(const MomentSpec& spec, int m_ctrl, double ridge = 0.0);

/// |int exp(i w_k s) v(s) ds - m_k| with exact per-interval integrals.
Eigen::VectorXd verify_moments(const ControlSignal& v, const MomentSpec& spec);

struct SingleDirectionResult {
  ControlSignal u;          ///< q channels, u = v * alpha
  Eigen::VectorXd alpha;    ///< mu = sum_j alpha_j Q_j
  Eigen::VectorXd moment_residuals;
  bool tail_ignored = false;  ///< target had components above the trusted range
  double tail_norm = 0.0;
  double terminal_error = 0.0;  ///< relative H^3 error of the W-free propagation
};

/// Control for the W-free linear equation reaching xi_target at T. The
/// scalar control is embedded through mu's coordinates in span(Q); throws
/// NotInControlSpan if mu is not in that span.
SingleDirectionResult single_direction_control(const ModalState& xi_target, const ProblemParams& params,
                                               const Profile& mu, int m_ctrl = 128, double ridge = 0.0);

/// Copy of params with W replaced by zero.
ProblemParams without_w(const ProblemParams& params);

}  // namespace nlsctl
