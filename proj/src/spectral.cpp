#include "nlsctl/spectral.hpp"

#include "nlsctl/error.hpp"

#include <cmath>
#include <numbers>

namespace nlsctl {

using std::numbers::pi;

ModalState ModalState::basis(int n, int k, cplx amplitude) {
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "mode index out of range");
  ModalState s = zero(n);
  s(k) = amplitude;
  return s;
}

ModalState ModalState::resized(int n) const {
  ModalState s = zero(n);
  const int m = std::min(n, truncation());
  s.coeffs.head(m) = coeffs.head(m);
  return s;
}

ModalState& ModalState::operator+=(const ModalState& o) {
  if (o.truncation() != truncation()) throw Error(ErrorCode::ShapeMismatch, "modal truncations differ");
  coeffs += o.coeffs;
  return *this;
}

ModalState& ModalState::operator-=(const ModalState& o) {
  if (o.truncation() != truncation()) throw Error(ErrorCode::ShapeMismatch, "modal truncations differ");
  coeffs -= o.coeffs;
  return *this;
}

ModalState operator+(ModalState a, const ModalState& b) { return a += b; }
ModalState operator-(ModalState a, const ModalState& b) { return a -= b; }
ModalState operator*(cplx a, ModalState s) { return s *= a; }

Eigen::MatrixXd sine_matrix(int grid_size, int truncation) {
  const int m = grid_size;
  Eigen::MatrixXd s(m + 1, truncation);
  const double root2 = std::sqrt(2.0);
  for (int k = 1; k <= truncation; ++k) {
    for (int j = 0; j <= m; ++j) {
      // Reduce k*j modulo 2M so that nodal zeros come out exact.
      const long r = (static_cast<long>(k) * j) % (2L * m);
      s(j, k - 1) = (r % m == 0) ? 0.0 : root2 * std::sin(pi * static_cast<double>(r) / m);
    }
  }
  return s;
}

Eigen::VectorXcd modal_to_grid(const ModalState& state, int grid_size) {
  if (grid_size < state.truncation())
    throw Error(ErrorCode::Aliasing, "grid size " + std::to_string(grid_size) + " below truncation " +
                                         std::to_string(state.truncation()));
  return sine_matrix(grid_size, state.truncation()).cast<cplx>() * state.coeffs;
}

ModalState grid_to_modal(const Eigen::VectorXcd& samples, int truncation, double endpoint_tol) {
  const int m = static_cast<int>(samples.size()) - 1;
  if (m < 2 * truncation)
    throw Error(ErrorCode::Aliasing, "grid size " + std::to_string(m) + " below 2N = " +
                                         std::to_string(2 * truncation));
  if (std::abs(samples(0)) > endpoint_tol || std::abs(samples(m)) > endpoint_tol)
    throw Error(ErrorCode::DirichletViolation, "field does not vanish at the endpoints");
  // Interior trapezoid weights are 1/M; endpoint terms vanish.
  const Eigen::MatrixXd s = sine_matrix(m, truncation);
  return ModalState((s.transpose().cast<cplx>() * samples) / static_cast<double>(m));
}

ModalState grid_to_modal(const SampledField& field, int truncation, double endpoint_tol) {
  return grid_to_modal(Eigen::VectorXcd(field.values.cast<cplx>()), truncation, endpoint_tol);
}

Eigen::VectorXd project_real(const Eigen::VectorXd& samples, int truncation) {
  const int m = static_cast<int>(samples.size()) - 1;
  const Eigen::MatrixXd s = sine_matrix(m, truncation);
  // sine_matrix vanishes at both endpoints, so the trapezoid endpoint halves drop out.
  return (s.transpose() * samples) / static_cast<double>(m);
}

double trapezoid(const Eigen::VectorXd& samples) {
  const Eigen::Index m = samples.size() - 1;
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "need at least two samples");
  return (samples.sum() - 0.5 * (samples(0) + samples(m))) / static_cast<double>(m);
}

cplx trapezoid(const Eigen::VectorXcd& samples) {
  const Eigen::Index m = samples.size() - 1;
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "need at least two samples");
  return (samples.sum() - 0.5 * (samples(0) + samples(m))) / static_cast<double>(m);
}

cplx inner_complex(const ModalState& f, const ModalState& g) {
  if (f.truncation() != g.truncation()) throw Error(ErrorCode::ShapeMismatch, "modal truncations differ");
  // Eigen's dot conjugates its first argument.
  return g.coeffs.dot(f.coeffs);
}

cplx inner_complex(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::ShapeMismatch, "sample counts differ");
  return trapezoid(Eigen::VectorXcd(f.array() * g.array().conjugate()));
}

double inner_l2(const ModalState& f, const ModalState& g) { return inner_complex(f, g).real(); }
double inner_l2(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) { return inner_complex(f, g).real(); }

Eigen::VectorXd sobolev_weights(int truncation, double s) {
  Eigen::VectorXd w(truncation);
  for (int k = 1; k <= truncation; ++k) w(k - 1) = std::pow(k * pi, s);
  return w;
}

double sobolev_norm(const ModalState& state, double s) {
  const Eigen::VectorXd w = sobolev_weights(state.truncation(), s);
  return (w.array() * state.coeffs.array().abs()).matrix().norm();
}

bool is_tangent(const ModalState& state, const ModalState& phi, double tol) {
  return std::abs(inner_l2(state, phi)) <= tol;
}

Eigen::MatrixXd galerkin_matrix(const SampledField& potential, int truncation) {
  const int m = potential.grid_size();
  if (m < 2 * truncation)
    throw Error(ErrorCode::Aliasing, "potential grid " + std::to_string(m) + " below 2N = " +
                                         std::to_string(2 * truncation));
  const Eigen::MatrixXd s = sine_matrix(m, truncation);
  Eigen::MatrixXd g = s.transpose() * potential.values.asDiagonal() * s / static_cast<double>(m);
  return 0.5 * (g + g.transpose());
}

SpectralOperator build_operator(const SampledField& potential, int truncation) {
  if (truncation < 1) throw Error(ErrorCode::InvalidArgument, "truncation must be positive");
  if (!potential.values.allFinite())
    throw Error(ErrorCode::InvalidPotential, "potential has non-finite samples");

  SpectralOperator op;
  op.potential = potential;
  op.matrix = galerkin_matrix(potential, truncation);
  for (int k = 1; k <= truncation; ++k) op.matrix(k - 1, k - 1) += k * k * pi * pi;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidPotential, "eigensolver failed");
  op.eigenvalues = solver.eigenvalues();
  op.eigenvectors = solver.eigenvectors();
  for (int k = 0; k < truncation; ++k) {
    auto v = op.eigenvectors.col(k);
    const double scale = v.cwiseAbs().maxCoeff();
    for (int j = 0; j < truncation; ++j) {
      if (std::abs(v(j)) > 1e-8 * scale) {
        if (v(j) < 0.0) v = -v;
        break;
      }
    }
  }
  return op;
}

bool OperatorCheck::ok(double orth_tol, double residual_tol) const {
  return strictly_increasing && orthonormality_error <= orth_tol &&
         (residuals.size() == 0 || residuals.maxCoeff() <= residual_tol);
}

OperatorCheck check_operator(const SpectralOperator& op) {
  OperatorCheck c;
  const int n = op.truncation();
  const Eigen::MatrixXd gram = op.eigenvectors.transpose() * op.eigenvectors;
  c.orthonormality_error = (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const int trusted = op.trusted_count();
  c.residuals.resize(trusted);
  for (int k = 0; k < trusted; ++k) {
    const Eigen::VectorXd v = op.eigenvectors.col(k);
    c.residuals(k) = (op.matrix * v - op.eigenvalues(k) * v).norm();
  }
  for (int k = 1; k < n; ++k)
    if (!(op.eigenvalues(k) > op.eigenvalues(k - 1))) c.strictly_increasing = false;
  return c;
}

AsymptoticsReport check_asymptotics(const SpectralOperator& op) {
  AsymptoticsReport r;
  const int trusted = op.trusted_count();
  r.mean_potential = trapezoid(op.potential.values);
  r.remainders.resize(trusted);
  r.partial_sums.resize(trusted);
  double sum = 0.0;
  for (int k = 1; k <= trusted; ++k) {
    const double rk = op.eigenvalue(k) - k * k * pi * pi - r.mean_potential;
    r.remainders(k - 1) = rk;
    sum += rk * rk;
    r.partial_sums(k - 1) = sum;
  }
  // Plateau heuristic: over the upper half of the trusted range the increments
  // r_k^2 do not grow, and the last increment is small against the total.
  bool plateau = true;
  const int start = std::max(2, trusted / 2);
  const double slack = 1e-20 + 1e-12 * sum;
  for (int k = start; k <= trusted; ++k) {
    const double prev = r.remainders(k - 2) * r.remainders(k - 2);
    const double cur = r.remainders(k - 1) * r.remainders(k - 1);
    if (cur > prev + slack) plateau = false;
  }
  const double last = r.remainders(trusted - 1) * r.remainders(trusted - 1);
  if (sum > 1e-24 && last > 1e-2 * sum) plateau = false;
  r.pass = plateau;
  r.note = "surrogate: plateau of partial sums of r_k^2 on k <= N/2, no rate certified";
  return r;
}

Eigen::VectorXd mu_couplings(const SampledField& mu, const SpectralOperator& op) {
  const int n = op.truncation();
  const int m = mu.grid_size();
  if (m < 2 * n)
    throw Error(ErrorCode::Aliasing, "mu grid " + std::to_string(m) + " below 2N = " + std::to_string(2 * n));
  const Eigen::VectorXd phi = (sine_matrix(m, n) * op.eigenvectors.col(0));
  const Eigen::VectorXd b = project_real(Eigen::VectorXd(mu.values.array() * phi.array()), n);
  return op.eigenvectors.transpose() * b;
}

MuBoundReport verify_mu_bound(const SampledField& mu, const SpectralOperator& op, int max_k, double zero_tol) {
  if (max_k < 1 || max_k > op.trusted_count())
    throw Error(ErrorCode::InvalidArgument, "K = " + std::to_string(max_k) + " outside trusted range 1.." +
                                                std::to_string(op.trusted_count()));
  const Eigen::VectorXd c = mu_couplings(mu, op);
  MuBoundReport rep;
  rep.c_est = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= max_k; ++k) {
    const double coef = c(k - 1);
    const double scaled = static_cast<double>(k) * k * k * std::abs(coef);
    rep.table.push_back({k, coef, scaled});
    if (!rep.zero_at && std::abs(coef) < zero_tol) rep.zero_at = k;
    if (scaled < rep.c_est) {
      rep.c_est = scaled;
      rep.argmin_k = k;
    }
  }
  rep.pass = !rep.zero_at && rep.c_est > zero_tol;
  return rep;
}

}  // namespace nlsctl
