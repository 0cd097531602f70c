#pragma once

// Batch kernels with an OpenMP path and a serial reference. Both paths run
// the same per-item arithmetic, so results agree bit for bit.

#include "nlsctl/dynamics.hpp"

#include <vector>

namespace nlsctl::kernels {

enum class Exec { Serial, Parallel };

/// Input-output matrix of v -> xi(T) for the linear equation from xi(0) = 0.
/// Column c * bins + l is the stacked real terminal state for the control
/// supported on bin l of channel c with value 1/sqrt(bin width), i.e. an
/// L^2-normalized indicator.
Eigen::MatrixXd linear_io_matrix(const ProblemParams& params, int bins, Exec exec = Exec::Parallel);

/// Jacobian of u -> Psi_T(psi0, u) in stacked real coordinates along `around`,
/// with respect to the values of a piecewise-constant control on `bins`
/// uniform bins per channel (column c * bins + l).
Eigen::MatrixXd nls_jacobian(const Trajectory& around, const ProblemParams& params, int bins,
                             Exec exec = Exec::Parallel);

struct KappaSample {
  double kappa = 0.0;
  Eigen::VectorXd lambda;      ///< lambda_{k,kappa}, k = 1..k_max
  Eigen::VectorXd dlambda_fd;  ///< centred difference in kappa
  Eigen::VectorXd dlambda_hf;  ///< <2 phi_1^2 phi_k, phi_k>
};

/// Eigen-data of A_kappa = -d^2/dx^2 - pi^2 + 2 kappa phi_1^2 at each kappa.
std::vector<KappaSample> kappa_samples(const std::vector<double>& kappas, int k_max, int N, double fd_step,
                                       Exec exec = Exec::Parallel);

/// Lowest k_max eigenvalues of A_kappa (no derivatives).
Eigen::VectorXd kappa_eigenvalues(double kappa, int k_max, int N);

}  // namespace nlsctl::kernels
