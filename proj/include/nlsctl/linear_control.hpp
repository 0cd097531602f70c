#pragma once

#include "nlsctl/dynamics.hpp"

#include <iosfwd>
#include <optional>

namespace nlsctl {

struct GramReport {
  int rows = 0;
  int cols = 0;
  Eigen::VectorXd singular_values;  ///< descending, of the tangent-projected matrix
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double residual = 0.0;  ///< relative H^3 residual of the solved instance
  /// Left singular vector of the smallest singular value of the unweighted
  /// tangent-projected map, as a state.
  ModalState weakest_direction;
};

void write_gram_report(std::ostream& os, const GramReport& r);

struct LinearControlOptions {
  double rtol = 1e-12;          ///< pseudo-inverse cutoff relative to sigma_max
  double residual_tol = 1e-6;   ///< relative residual above which the solve is deficient
  bool throw_on_deficient = true;
  /// Warm start from the W-free single-profile control through this profile.
  std::optional<Profile> warm_start_mu;
};

struct LinearControlResult {
  ControlSignal v;
  GramReport report;
  bool deficient = false;
  ModalState unreachable;  ///< normalized residual direction when deficient
};

/// Reaches xi_target at T with the linear equation from xi(0) = 0 using
/// piecewise-constant controls on `basis_size` bins per channel. The
/// least-squares solve weights the rows by H^3 norms and selects the minimal
/// L^2 control. Throws ControlDeficient when the relative residual exceeds
/// residual_tol, unless throw_on_deficient is false.
LinearControlResult solve_linearized_control(const ModalState& xi_target, const ProblemParams& params,
                                             int basis_size, const LinearControlOptions& opts = {});

/// Orthonormal basis (2N x 2N-1) of {y : y^T D^{-1} [phi; 0] = 0}, i.e. the
/// image of the tangent space under the diagonal row weighting D.
Eigen::MatrixXd weighted_tangent_basis(const ProblemParams& params, const Eigen::VectorXd& row_weights);

/// (k pi)^3 on both the real and imaginary blocks.
Eigen::VectorXd h3_row_weights(int N);

/// Minimal-norm least squares x for G x = b via a truncated pseudo-inverse.
Eigen::VectorXd truncated_solve(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double rtol,
                                Eigen::VectorXd* singular_values = nullptr);

}  // namespace nlsctl
