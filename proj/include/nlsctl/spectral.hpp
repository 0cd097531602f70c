#pragma once

// Dirichlet sine basis phi_k(x) = sqrt(2) sin(k pi x) on (0,1), uniform-grid
// quadrature, H^s norms and Galerkin eigensolves of A_V = -d^2/dx^2 + V.

#include "nlsctl/field.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace nlsctl {

using cplx = std::complex<double>;

/// Complex coefficients c_1..c_N with respect to the sine basis.
struct ModalState {
  Eigen::VectorXcd coeffs;

  ModalState() = default;
  explicit ModalState(Eigen::VectorXcd c) : coeffs(std::move(c)) {}

  int truncation() const { return static_cast<int>(coeffs.size()); }
  /// 1-based mode access.
  cplx operator()(int k) const { return coeffs(k - 1); }
  cplx& operator()(int k) { return coeffs(k - 1); }

  static ModalState zero(int n) { return ModalState(Eigen::VectorXcd::Zero(n)); }
  /// amplitude * phi_k
  static ModalState basis(int n, int k, cplx amplitude = 1.0);
  static ModalState from_real(const Eigen::VectorXd& c) { return ModalState(c.cast<cplx>()); }

  ModalState conj() const { return ModalState(coeffs.conjugate()); }
  /// Zero-pads or truncates to n modes.
  ModalState resized(int n) const;

  ModalState& operator+=(const ModalState& o);
  ModalState& operator-=(const ModalState& o);
  ModalState& operator*=(cplx a) { coeffs *= a; return *this; }
};

ModalState operator+(ModalState a, const ModalState& b);
ModalState operator-(ModalState a, const ModalState& b);
ModalState operator*(cplx a, ModalState s);

/// Values sqrt(2) sin(k pi j / M) for j = 0..M (rows) and k = 1..N (columns).
/// Entries at nodes where k j is a multiple of M are exactly zero.
Eigen::MatrixXd sine_matrix(int grid_size, int truncation);

/// Samples sum_k c_k phi_k(x_j) at x_j = j/M. Requires M >= N.
Eigen::VectorXcd modal_to_grid(const ModalState& state, int grid_size);

/// Trapezoid projection c_k = int f phi_k. Requires M >= 2N and vanishing
/// endpoint values (|f| <= endpoint_tol).
ModalState grid_to_modal(const Eigen::VectorXcd& samples, int truncation, double endpoint_tol = 1e-10);
ModalState grid_to_modal(const SampledField& field, int truncation, double endpoint_tol = 1e-10);

/// Trapezoid projection of a real field, without the endpoint check. Used for
/// products such as mu * phi and Q_j * phi.
Eigen::VectorXd project_real(const Eigen::VectorXd& samples, int truncation);

/// Composite trapezoid rule on [0,1] over M+1 uniform samples.
double trapezoid(const Eigen::VectorXd& samples);
cplx trapezoid(const Eigen::VectorXcd& samples);

/// Full complex pairing int f conj(g).
cplx inner_complex(const ModalState& f, const ModalState& g);
cplx inner_complex(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);
/// Real scalar product Re int f conj(g).
double inner_l2(const ModalState& f, const ModalState& g);
double inner_l2(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);

/// (k pi)^s for k = 1..N.
Eigen::VectorXd sobolev_weights(int truncation, double s);
/// (sum_k (k^2 pi^2)^s |c_k|^2)^{1/2}; the scale is always the Dirichlet Laplacian.
double sobolev_norm(const ModalState& state, double s);

/// Re<state, phi> within tol.
bool is_tangent(const ModalState& state, const ModalState& phi, double tol = 1e-10);

/// Galerkin matrix <V phi_j, phi_k>, trapezoid on V's grid. Requires M >= 2N.
Eigen::MatrixXd galerkin_matrix(const SampledField& potential, int truncation);

struct SpectralOperator {
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< column k-1 holds phi_{k,V} in the sine basis
  Eigen::MatrixXd matrix;        ///< Galerkin matrix of A_V
  SampledField potential;

  int truncation() const { return static_cast<int>(eigenvalues.size()); }
  /// Eigenpairs with k <= N/2 are trusted.
  int trusted_count() const { return truncation() >= 2 ? truncation() / 2 : 1; }
  double eigenvalue(int k) const { return eigenvalues(k - 1); }
  ModalState eigenstate(int k) const { return ModalState::from_real(eigenvectors.col(k - 1)); }
};

/// Symmetric Galerkin eigensolve of A_V on N modes. Eigenvectors are
/// normalized and signed so their first non-negligible coefficient is positive.
SpectralOperator build_operator(const SampledField& potential, int truncation);

struct OperatorCheck {
  double orthonormality_error = 0.0;  ///< max |V^T V - I|
  Eigen::VectorXd residuals;          ///< ||G v_k - lambda_k v_k|| for trusted k
  bool strictly_increasing = true;
  bool ok(double orth_tol = 1e-10, double residual_tol = 1e-8) const;
};
OperatorCheck check_operator(const SpectralOperator& op);

struct AsymptoticsReport {
  Eigen::VectorXd remainders;    ///< r_k = lambda_k - k^2 pi^2 - int V, k = 1..trusted
  Eigen::VectorXd partial_sums;  ///< sum_{j<=k} r_j^2
  double mean_potential = 0.0;
  bool pass = false;
  /// The verdict is a plateau heuristic on the partial sums, not a rate bound.
  std::string note;
};
AsymptoticsReport check_asymptotics(const SpectralOperator& op);

struct MuBoundRow {
  int k;
  double coefficient;  ///< int mu phi phi_{k,V}
  double scaled;       ///< k^3 |coefficient|
};

struct MuBoundReport {
  double c_est = 0.0;
  int argmin_k = 0;
  std::vector<MuBoundRow> table;
  std::optional<int> zero_at;  ///< first k with a vanishing coefficient
  bool pass = false;
};

/// Projections of mu * phi_{1,V} onto the eigenbasis: entry k-1 is
/// int mu phi phi_{k,V} for k = 1..N.
Eigen::VectorXd mu_couplings(const SampledField& mu, const SpectralOperator& op);

/// c_est = min_{k<=K} k^3 |int mu phi phi_{k,V}|. PASS iff no coefficient is
/// below zero_tol and c_est > zero_tol. Requires K <= trusted range.
MuBoundReport verify_mu_bound(const SampledField& mu, const SpectralOperator& op, int max_k,
                              double zero_tol = 1e-12);

}  // namespace nlsctl
