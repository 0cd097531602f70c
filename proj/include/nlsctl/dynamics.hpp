#pragma once

// Time propagation. States live in the sine basis; real-linear maps (W Re xi,
// the conj(xi) term of the linearization) act on the stacked real vector
// [Re c; Im c] of length 2N.

#include "nlsctl/control_signal.hpp"
#include "nlsctl/field.hpp"
#include "nlsctl/spectral.hpp"

#include <string>
#include <vector>

namespace nlsctl {

/// Unsampled problem description. `W` empty means the linearization-induced
/// default W = 2 p kappa phi^{2p}.
struct ProblemSetup {
  Profile V = profiles::zero();
  Profile W;
  std::vector<Profile> Q = {profiles::one(), profiles::cos_pi(), profiles::cos_2pi(), profiles::x_sq()};
  double kappa = 0.5;
  int p = 1;
  double T = 1.0;
  int N = 16;
  int steps = 2048;
  int grid = 0;  ///< quadrature grid M; 0 selects 4N
  double h3_ceiling = 1e3;
};

/// Sampled problem with cached Galerkin data.
struct ProblemParams {
  ProblemSetup setup;
  int M = 0;
  SampledField V, W;
  std::vector<SampledField> Q;
  SpectralOperator op;
  ModalState phi;
  double lambda = 0.0;

  // Real-rep blocks: xi = a + i b evolves as a' = H b, b' = -(H + Wm) a - S v.
  Eigen::MatrixXd H;   ///< Galerkin(A_V) - lambda
  Eigen::MatrixXd Wm;  ///< Galerkin(W)
  Eigen::MatrixXd S;   ///< column j = sine coefficients of Q_j phi

  std::vector<std::string> warnings;

  int N() const { return setup.N; }
  int q() const { return static_cast<int>(Q.size()); }
  double T() const { return setup.T; }
  int steps() const { return setup.steps; }
  double kappa() const { return setup.kappa; }
  int p() const { return setup.p; }
  double dt() const { return setup.T / setup.steps; }
};

ProblemParams make_params(const ProblemSetup& setup);

/// Checks W(0) = W(1) = W'(0) = W'(1) = 0 by centred differences on the profile.
/// Returns the largest violation.
double w_boundary_violation(const Profile& W);

struct Trajectory {
  std::vector<ModalState> snapshots;  ///< steps + 1 states
  ControlSignal control;
  double T = 0.0;
  std::vector<std::string> warnings;

  const ModalState& terminal() const { return snapshots.back(); }
  int steps() const { return static_cast<int>(snapshots.size()) - 1; }
};

enum class LinearScheme {
  Exact,  ///< augmented matrix exponential, exact for step-aligned piecewise-constant v
  Split,  ///< exponential midpoint: half phase, midpoint kick, half phase
};

/// i xi' = (A_V - lambda) xi + W Re(xi) + <v(t), Q> phi, xi(0) = xi0.
/// The control is sampled at step midpoints.
Trajectory propagate_linear(const ModalState& xi0, const ControlSignal& v, const ProblemParams& params,
                            LinearScheme scheme = LinearScheme::Exact);

/// Terminal state only, same integrator.
ModalState propagate_linear_terminal(const ModalState& xi0, const ControlSignal& v, const ProblemParams& params,
                                     LinearScheme scheme = LinearScheme::Exact);

/// W-free solution by exact per-interval integration in the eigenbasis. Slow
/// reference for the W = 0 case; throws InvalidArgument if W is not zero.
ModalState duhamel_linear(const ControlSignal& v, const ProblemParams& params);

/// xi1 solves the W-free sourced equation, xi2 the W Re(xi1 + xi2) equation,
/// both from zero data; solved as one coupled linear system.
std::pair<ModalState, ModalState> split_xi(const ControlSignal& v, const ProblemParams& params);

/// Strang splitting: exact A_V half steps, pointwise phase
/// exp(-i dt (kappa |psi|^{2p} + <u, Q>)) on the N-point sine collocation grid.
/// Throws NotNormalized if |psi0| differs from 1 by more than 1e-10 and
/// LocalExistenceExceeded if the H^3 norm passes the ceiling.
Trajectory propagate_nls(const ModalState& psi0, const ControlSignal& u, const ProblemParams& params);

/// Same integrator with a different step count (for refinement checks).
Trajectory propagate_nls(const ModalState& psi0, const ControlSignal& u, const ProblemParams& params, int steps);

/// Tangent map of the discrete NLS flow along `around` in direction v, from
/// xi(0) = 0. Returns xi(T).
ModalState linearize(const Trajectory& around, const ControlSignal& v, const ProblemParams& params);

/// Constant u with <u, Q(x)> = -kappa phi^{2p}(x) - lambda, minimal Euclidean norm.
/// Throws SpanDeficient if the residual exceeds tol.
ControlSignal stationary_control(const ProblemParams& params, int intervals = 1, double tol = 1e-10);

/// Nonlinear collocation grid used by propagate_nls: x_j = j/(N+1), j = 1..N.
struct CollocationGrid {
  Eigen::MatrixXd S;  ///< N x N, S(j-1, k-1) = sqrt(2) sin(k pi j/(N+1)); S^T S = (N+1) I
  Eigen::MatrixXd Q;  ///< N x q control profiles at the nodes
  int N = 0;
};
CollocationGrid collocation_grid(const ProblemParams& params);

/// exp(-i A_V h/2) in the sine basis.
Eigen::MatrixXcd kinetic_half_step(const ProblemParams& params, double h);

/// Exact propagator of the real-rep linear system over h:
/// x(h) = Phi x(0) + Gamma v for constant v.
struct LinearStep {
  Eigen::MatrixXd Phi;    ///< 2N x 2N
  Eigen::MatrixXd Gamma;  ///< 2N x q
};
LinearStep linear_step(const ProblemParams& params, double h);

/// Stacked real representation helpers.
Eigen::VectorXd to_real(const ModalState& s);
ModalState from_real(const Eigen::VectorXd& x);

}  // namespace nlsctl
