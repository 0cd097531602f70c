#include "nlsctl/dynamics.hpp"

#include "nlsctl/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

namespace nlsctl {

using std::numbers::pi;

namespace {

constexpr double kNormTol = 1e-10;

Profile default_w(double kappa, int p) {
  return Profile("2p*kappa*phi1^2p", [kappa, p](double x) {
    const double phi = std::sqrt(2.0) * std::sin(pi * x);
    return 2.0 * p * kappa * std::pow(phi, 2 * p);
  });
}

void check_horizon(const ControlSignal& u, double T, int q) {
  if (u.channels() != q)
    throw Error(ErrorCode::ShapeMismatch, "control has " + std::to_string(u.channels()) + " channels, Q has " +
                                              std::to_string(q));
  if (std::abs(u.horizon() - T) > 1e-12 * std::max(1.0, T))
    throw Error(ErrorCode::TimeGridMismatch, "control horizon " + std::to_string(u.horizon()) +
                                                 " differs from T = " + std::to_string(T));
}

Eigen::VectorXd midpoint_value(const ControlSignal& u, int n, double h) { return u.at((n + 0.5) * h); }

}  // namespace

Eigen::VectorXd to_real(const ModalState& s) {
  const int n = s.truncation();
  Eigen::VectorXd x(2 * n);
  x.head(n) = s.coeffs.real();
  x.tail(n) = s.coeffs.imag();
  return x;
}

ModalState from_real(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() / 2;
  Eigen::VectorXcd c(n);
  c.real() = x.head(n);
  c.imag() = x.tail(n);
  return ModalState(std::move(c));
}

double w_boundary_violation(const Profile& W) {
  const double d = 1e-5;
  const double w0 = std::abs(W(0.0)), w1 = std::abs(W(1.0));
  const double dw0 = std::abs((W(d) - W(0.0)) / d);
  const double dw1 = std::abs((W(1.0) - W(1.0 - d)) / d);
  // One-sided differences carry an O(d) error proportional to W''.
  return std::max({w0, w1, dw0, dw1});
}

ProblemParams make_params(const ProblemSetup& setup) {
  if (setup.N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  if (setup.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  if (!(setup.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (setup.p < 1) throw Error(ErrorCode::InvalidArgument, "p must be a positive integer");

  ProblemParams P;
  P.setup = setup;
  if (P.setup.W.empty()) P.setup.W = default_w(setup.kappa, setup.p);
  P.M = setup.grid > 0 ? setup.grid : 4 * setup.N;
  if (P.M < 2 * setup.N) throw Error(ErrorCode::Aliasing, "grid M below 2N");

  P.V = P.setup.V.sample(P.M);
  P.W = P.setup.W.sample(P.M);
  if (!P.W.values.allFinite()) throw Error(ErrorCode::InvalidPotential, "W has non-finite samples");
  for (const auto& q : P.setup.Q) P.Q.push_back(q.sample(P.M));

  P.op = build_operator(P.V, setup.N);
  P.phi = P.op.eigenstate(1);
  P.lambda = P.op.eigenvalue(1);

  const int n = setup.N;
  P.H = P.op.matrix - P.lambda * Eigen::MatrixXd::Identity(n, n);
  P.Wm = galerkin_matrix(P.W, n);
  const Eigen::VectorXd phi_grid = modal_to_grid(P.phi, P.M).real();
  P.S.resize(n, P.q());
  for (int j = 0; j < P.q(); ++j)
    P.S.col(j) = project_real(Eigen::VectorXd(P.Q[j].values.array() * phi_grid.array()), n);

  const double viol = w_boundary_violation(P.setup.W);
  if (viol > 1e-4)
    P.warnings.push_back("W violates W(0)=W(1)=W'(0)=W'(1)=0 (max " + std::to_string(viol) +
                         "); H^3 stability bound check disabled");
  return P;
}

LinearStep linear_step(const ProblemParams& P, double h) {
  const int n = P.N(), q = P.q();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n + q, 2 * n + q);
  G.block(0, n, n, n) = P.H;
  G.block(n, 0, n, n) = -(P.H + P.Wm);
  G.block(n, 2 * n, n, q) = -P.S;
  const Eigen::MatrixXd E = (G * h).exp();
  return {E.topLeftCorner(2 * n, 2 * n), E.block(0, 2 * n, 2 * n, q)};
}

namespace {

// exp(-i (A_V - shift) h) in the sine basis.
Eigen::MatrixXcd phase_matrix(const ProblemParams& P, double h, double shift) {
  const Eigen::MatrixXd& U = P.op.eigenvectors;
  Eigen::VectorXcd d(P.N());
  for (int k = 0; k < P.N(); ++k) d(k) = std::exp(cplx(0.0, -(P.op.eigenvalues(k) - shift) * h));
  return U.cast<cplx>() * d.asDiagonal() * U.transpose().cast<cplx>();
}

template <class Sink>
void run_linear(const ModalState& xi0, const ControlSignal& v, const ProblemParams& P, LinearScheme scheme,
                Sink&& sink) {
  const int n = P.N();
  if (xi0.truncation() > n) throw Error(ErrorCode::ShapeMismatch, "initial state exceeds truncation");
  check_horizon(v, P.T(), P.q());
  const double h = P.dt();
  if (scheme == LinearScheme::Exact) {
    const LinearStep st = linear_step(P, h);
    Eigen::VectorXd x = to_real(xi0.resized(n));
    sink(0, x);
    for (int s = 0; s < P.steps(); ++s) {
      x = st.Phi * x + st.Gamma * midpoint_value(v, s, h);
      sink(s + 1, x);
    }
  } else {
    const Eigen::MatrixXcd K = phase_matrix(P, 0.5 * h, P.lambda);
    Eigen::VectorXcd c = xi0.resized(n).coeffs;
    sink(0, to_real(ModalState(c)));
    for (int s = 0; s < P.steps(); ++s) {
      c = K * c;
      const Eigen::VectorXd kick = P.Wm * c.real() + P.S * midpoint_value(v, s, h);
      c -= cplx(0.0, h) * kick.cast<cplx>();
      c = K * c;
      sink(s + 1, to_real(ModalState(c)));
    }
  }
}

}  // namespace

Trajectory propagate_linear(const ModalState& xi0, const ControlSignal& v, const ProblemParams& P,
                            LinearScheme scheme) {
  Trajectory tr;
  tr.control = v;
  tr.T = P.T();
  tr.warnings = P.warnings;
  tr.snapshots.reserve(P.steps() + 1);
  run_linear(xi0, v, P, scheme, [&](int, const Eigen::VectorXd& x) { tr.snapshots.push_back(from_real(x)); });
  return tr;
}

ModalState propagate_linear_terminal(const ModalState& xi0, const ControlSignal& v, const ProblemParams& P,
                                     LinearScheme scheme) {
  Eigen::VectorXd last;
  run_linear(xi0, v, P, scheme, [&](int s, const Eigen::VectorXd& x) {
    if (s == P.steps()) last = x;
  });
  return from_real(last);
}

ModalState duhamel_linear(const ControlSignal& v, const ProblemParams& P) {
  if (P.Wm.cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorCode::InvalidArgument, "duhamel_linear needs W = 0");
  check_horizon(v, P.T(), P.q());
  const int n = P.N();
  const double T = P.T();
  const Eigen::MatrixXd& U = P.op.eigenvectors;
  // Eigen-coordinates: d_k' = -i w_k d_k - i <S v, e_k>.
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
  const Eigen::MatrixXd US = U.transpose() * P.S;
  for (int j = 0; j < v.intervals(); ++j) {
    const double a = v.times(j), b = v.times(j + 1);
    const Eigen::VectorXd f = US * v.values.row(j).transpose();
    for (int k = 0; k < n; ++k) {
      const double w = P.op.eigenvalues(k) - P.lambda;
      // int_a^b exp(-i w (T - s)) ds
      cplx I;
      if (std::abs(w) * (b - a) < 1e-8) {
        I = (b - a) * std::exp(cplx(0.0, -w * (T - 0.5 * (a + b))));
      } else {
        I = (std::exp(cplx(0.0, -w * (T - b))) - std::exp(cplx(0.0, -w * (T - a)))) / cplx(0.0, w);
      }
      d(k) += cplx(0.0, -1.0) * f(k) * I;
    }
  }
  return ModalState(U.cast<cplx>() * d);
}

std::pair<ModalState, ModalState> split_xi(const ControlSignal& v, const ProblemParams& P) {
  check_horizon(v, P.T(), P.q());
  const int n = P.N(), q = P.q();
  // State [a1; b1; a2; b2] plus constant inputs.
  const int d = 4 * n + q;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  G.block(0, n, n, n) = P.H;
  G.block(n, 0, n, n) = -P.H;
  G.block(n, 4 * n, n, q) = -P.S;
  G.block(2 * n, 3 * n, n, n) = P.H;
  G.block(3 * n, 2 * n, n, n) = -(P.H + P.Wm);
  G.block(3 * n, 0, n, n) = -P.Wm;
  const double h = P.dt();
  const Eigen::MatrixXd E = (G * h).exp();
  const Eigen::MatrixXd Phi = E.topLeftCorner(4 * n, 4 * n);
  const Eigen::MatrixXd Gam = E.block(0, 4 * n, 4 * n, q);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4 * n);
  for (int s = 0; s < P.steps(); ++s) x = Phi * x + Gam * midpoint_value(v, s, h);
  return {from_real(x.head(2 * n)), from_real(x.tail(2 * n))};
}

CollocationGrid collocation_grid(const ProblemParams& P) {
  CollocationGrid g;
  g.N = P.N();
  const int n = g.N;
  g.S = sine_matrix(n + 1, n).middleRows(1, n);
  g.Q.resize(n, P.q());
  for (int j = 1; j <= n; ++j)
    for (int c = 0; c < P.q(); ++c) g.Q(j - 1, c) = P.setup.Q[c](static_cast<double>(j) / (n + 1));
  return g;
}

Eigen::MatrixXcd kinetic_half_step(const ProblemParams& P, double h) { return phase_matrix(P, 0.5 * h, 0.0); }

Trajectory propagate_nls(const ModalState& psi0, const ControlSignal& u, const ProblemParams& P) {
  return propagate_nls(psi0, u, P, P.steps());
}

Trajectory propagate_nls(const ModalState& psi0, const ControlSignal& u, const ProblemParams& P, int steps) {
  const int n = P.N();
  if (psi0.truncation() > n) throw Error(ErrorCode::ShapeMismatch, "initial state exceeds truncation");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  const double norm = psi0.coeffs.norm();
  if (std::abs(norm - 1.0) > kNormTol)
    throw Error(ErrorCode::NotNormalized, "initial L2 norm " + std::to_string(norm) + " differs from 1");
  check_horizon(u, P.T(), P.q());

  const double h = P.T() / steps;
  const Eigen::MatrixXcd K = kinetic_half_step(P, h);
  const CollocationGrid g = collocation_grid(P);
  const Eigen::MatrixXcd Sg = g.S.cast<cplx>();
  const Eigen::MatrixXcd SgT = g.S.transpose().cast<cplx>() / static_cast<double>(n + 1);
  const double kappa = P.kappa();
  const int p = P.p();

  Trajectory tr;
  tr.control = u;
  tr.T = P.T();
  tr.snapshots.reserve(steps + 1);
  Eigen::VectorXcd c = psi0.resized(n).coeffs;
  tr.snapshots.emplace_back(c);
  for (int s = 0; s < steps; ++s) {
    c = K * c;
    Eigen::VectorXcd f = Sg * c;
    const Eigen::VectorXd uq = g.Q * midpoint_value(u, s, h);
    for (int j = 0; j < n; ++j) {
      const double theta = kappa * std::pow(std::norm(f(j)), p) + uq(j);
      f(j) *= std::exp(cplx(0.0, -h * theta));
    }
    c = K * (SgT * f);
    tr.snapshots.emplace_back(c);
    const double h3 = sobolev_norm(tr.snapshots.back(), 3.0);
    if (!(h3 <= P.setup.h3_ceiling))
      throw Error(ErrorCode::LocalExistenceExceeded, "H^3 norm " + std::to_string(h3) + " above ceiling at t = " +
                                                         std::to_string((s + 1) * h));
  }
  return tr;
}

ModalState linearize(const Trajectory& around, const ControlSignal& v, const ProblemParams& P) {
  const int n = P.N();
  const int steps = around.steps();
  if (steps < 1 || std::abs(around.T - P.T()) > 1e-12 * std::max(1.0, P.T()))
    throw Error(ErrorCode::TimeGridMismatch, "trajectory does not match the problem horizon");
  check_horizon(v, P.T(), P.q());
  check_horizon(around.control, P.T(), P.q());

  const double h = P.T() / steps;
  const Eigen::MatrixXcd K = kinetic_half_step(P, h);
  const CollocationGrid g = collocation_grid(P);
  const Eigen::MatrixXcd Sg = g.S.cast<cplx>();
  const Eigen::MatrixXcd SgT = g.S.transpose().cast<cplx>() / static_cast<double>(n + 1);
  const double kappa = P.kappa();
  const int p = P.p();

  Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(n);
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXcd chi = Sg * (K * around.snapshots[s].coeffs);
    Eigen::VectorXcd e = Sg * (K * eta);
    const Eigen::VectorXd uq = g.Q * midpoint_value(around.control, s, h);
    const Eigen::VectorXd vq = g.Q * midpoint_value(v, s, h);
    for (int j = 0; j < n; ++j) {
      const double r2 = std::norm(chi(j));
      const double theta = kappa * std::pow(r2, p) + uq(j);
      const double dtheta =
          2.0 * p * kappa * std::pow(r2, p - 1) * (std::conj(chi(j)) * e(j)).real() + vq(j);
      e(j) = std::exp(cplx(0.0, -h * theta)) * (e(j) - cplx(0.0, h) * chi(j) * dtheta);
    }
    eta = K * (SgT * e);
  }
  return ModalState(std::move(eta));
}

ControlSignal stationary_control(const ProblemParams& P, int intervals, double tol) {
  const int m = P.M;
  const int q = P.q();
  const Eigen::VectorXd phi = modal_to_grid(P.phi, m).real();
  const Eigen::VectorXd phi2p = phi.array().pow(2 * P.p());
  Eigen::MatrixXd A(m + 1, std::max(q, 1));
  A.setZero();
  for (int c = 0; c < q; ++c) A.col(c) = P.Q[c].values;
  const Eigen::VectorXd rhs = -P.kappa() * phi2p - Eigen::VectorXd::Constant(m + 1, P.lambda);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  auto residual_of = [&](const Eigen::VectorXd& target) {
    return (A * svd.solve(target) - target).cwiseAbs().maxCoeff();
  };

  const Eigen::VectorXd uhat = svd.solve(rhs);
  const double res = (A * uhat - rhs).cwiseAbs().maxCoeff();
  if (q == 0 || res > tol) {
    std::string missing;
    if (q == 0 || residual_of(Eigen::VectorXd::Ones(m + 1)) > tol) missing = "constant 1";
    if (P.kappa() != 0.0 && (q == 0 || residual_of(phi2p) > tol))
      missing += std::string(missing.empty() ? "" : " and ") + "phi^" + std::to_string(2 * P.p());
    if (missing.empty()) missing = "-kappa phi^2p - lambda";
    throw Error(ErrorCode::SpanDeficient, "span of Q misses " + missing + " (residual " + std::to_string(res) + ")");
  }
  return ControlSignal::constant(P.T(), uhat.head(q), intervals);
}

}  // namespace nlsctl
