#pragma once

// Reachability ladder of the linearized equation. Subspaces are stored as
// orthonormal columns in the stacked real representation [Re c; Im c].

#include "nlsctl/dynamics.hpp"

#include <optional>
#include <vector>

namespace nlsctl {

/// g -> i ((A_V - lambda) g + W Re g).
ModalState apply_generator(const ModalState& g, const ProblemParams& params);
/// Same map as a 2N x 2N real matrix.
Eigen::MatrixXd generator_matrix(const ProblemParams& params);

struct SaturationLadder {
  std::vector<Eigen::MatrixXd> levels;  ///< orthonormal bases, 2N x rank
  std::vector<int> ranks;
  bool stabilized = false;  ///< three consecutive equal ranks
};

/// Orthonormal basis of span(columns) with singular values above tol * largest.
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& columns, double tol);

/// Level 0 is the real span of {Q_j phi}; level j adds the generator images
/// of level j-1.
SaturationLadder build_ladder(const ProblemParams& params, int j_max, double tol = 1e-8);
/// Same recursion from explicit level-0 vectors (stacked real columns).
SaturationLadder build_ladder(const ProblemParams& params, const Eigen::MatrixXd& level0, int j_max,
                              double tol = 1e-8);

struct SaturationVerdict {
  bool saturating = false;
  int dimension = 0;  ///< rank of P_1 applied to the last level
  int target = 0;     ///< 2N - 1
  int codim = 0;
  bool partial = false;  ///< ladder did not stabilize within j_max
  /// Unit direction in the tangent space L^2-orthogonal to the reached span,
  /// present when codim == 1.
  std::optional<ModalState> missed;
};

/// H^3-orthogonal projection onto {g : Re<g, phi> = 0}, stacked real form.
Eigen::MatrixXd tangent_projector_h3(const ProblemParams& params);

SaturationVerdict saturation_verdict(const SaturationLadder& ladder, const ProblemParams& params,
                                     double tol = 1e-8);

struct Crossing {
  int k = 0;
  double kappa_star = 0.0;
  double residual = 0.0;  ///< |lambda_k(kappa_star)|
};

struct KappaSweepResult {
  std::vector<double> kappa_grid;
  Eigen::MatrixXd lambda;      ///< samples x k_max
  Eigen::MatrixXd dlambda_fd;  ///< samples x k_max
  Eigen::MatrixXd dlambda_hf;  ///< samples x k_max
  std::vector<Crossing> crossings;  ///< sorted by kappa, then k
  bool strictly_increasing = true;
  double max_hf_rel_error = 0.0;
};

/// Tracks the lowest k_max eigenvalues of A_kappa = -d^2/dx^2 - pi^2 + 2 kappa phi_1^2
/// on a uniform kappa grid and bisects sign changes to `bisect_tol`.
KappaSweepResult kappa_sweep(int k_max, double kappa_lo, double kappa_hi, int samples, int N,
                             double fd_step = 1e-4, double bisect_tol = 1e-10);

/// Angle in radians between the real spans of two nonzero states.
double direction_angle(const ModalState& a, const ModalState& b);

}  // namespace nlsctl
