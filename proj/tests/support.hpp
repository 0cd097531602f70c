#pragma once

// Shared test support: seeded generators for property tests and oracles that
// do not go through the library's own Galerkin or time-stepping code.

#include "nlsctl/dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace testsupport {

using nlsctl::cplx;
using nlsctl::ModalState;
constexpr double pi = std::numbers::pi;

// Generators ----------------------------------------------------------------

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return nd_(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Normal coefficients on modes 1..kmax of an N-mode state.
  ModalState state(int N, int kmax) {
    ModalState s = ModalState::zero(N);
    for (int k = 1; k <= kmax; ++k) {
      const double re = normal();
      s(k) = cplx(re, normal());
    }
    return s;
  }

  /// Trigonometric-polynomial potential a0 + sum_m a_m cos(2 m pi x), m <= terms.
  nlsctl::Profile trig_potential(int terms) {
    std::vector<double> a(terms + 1);
    for (auto& c : a) c = uniform(-5.0, 5.0);
    return nlsctl::Profile("trig", [a](double x) {
      double v = a[0];
      for (std::size_t m = 1; m < a.size(); ++m) v += a[m] * std::cos(2.0 * static_cast<double>(m) * pi * x);
      return v;
    });
  }

  nlsctl::ControlSignal control(double T, int bins, int channels, double scale) {
    Eigen::MatrixXd v(bins, channels);
    for (int c = 0; c < channels; ++c)
      for (int l = 0; l < bins; ++l) v(l, c) = scale * normal();
    return nlsctl::ControlSignal::uniform(T, v);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> nd_;
};

/// Runs `body(gen, case)` for `cases` independently seeded generators.
inline void for_all(int cases, std::uint64_t seed, const std::function<void(Gen&, int)>& body) {
  for (int c = 0; c < cases; ++c) {
    Gen g(seed + 7919u * static_cast<std::uint64_t>(c));
    body(g, c);
  }
}

// Oracles -------------------------------------------------------------------

/// Pointwise sum_k c_k sqrt(2) sin(k pi x).
inline cplx evaluate(const ModalState& s, double x) {
  cplx v = 0.0;
  for (int k = 1; k <= s.truncation(); ++k) v += s(k) * std::sqrt(2.0) * std::sin(k * pi * x);
  return v;
}

/// Composite Simpson on [0,1] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, int n = 4096) {
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(j * h);
  return s * h / 3.0;
}

/// <cos(2 pi x) phi_j, phi_k> in closed form: 1/2 on |j-k| = 2, -1/2 at j = k = 1.
inline Eigen::MatrixXd cos2_matrix(int N) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  for (int j = 0; j + 2 < N; ++j) C(j, j + 2) = C(j + 2, j) = 0.5;
  C(0, 0) = -0.5;
  return C;
}

/// Galerkin matrix of -d^2/dx^2 - pi^2 + 2 kappa phi_1^2 built from closed forms.
inline Eigen::MatrixXd kappa_operator(double kappa, int N) {
  Eigen::MatrixXd A = -2.0 * kappa * cos2_matrix(N);
  for (int k = 1; k <= N; ++k) A(k - 1, k - 1) += k * k * pi * pi - pi * pi + 2.0 * kappa;
  return A;
}

/// Real-rep generator of the W-perturbed linear flow for V = 0, W = 2 kappa phi_1^2:
/// x' = F x + B v with x = [Re c; Im c].
inline Eigen::MatrixXd linear_flow_matrix(double kappa, int N) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (int k = 1; k <= N; ++k) H(k - 1, k - 1) = k * k * pi * pi - pi * pi;
  const Eigen::MatrixXd Wm = 2.0 * kappa * (Eigen::MatrixXd::Identity(N, N) - cos2_matrix(N));
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  F.topRightCorner(N, N) = H;
  F.bottomLeftCorner(N, N) = -(H + Wm);
  return F;
}

/// Crank-Nicolson for x' = F x.
inline Eigen::VectorXd crank_nicolson(const Eigen::MatrixXd& F, Eigen::VectorXd x, double T, int steps) {
  const double h = T / steps;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(F.rows(), F.cols());
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - 0.5 * h * F);
  const Eigen::MatrixXd R = I + 0.5 * h * F;
  for (int n = 0; n < steps; ++n) x = lu.solve(R * x);
  return x;
}

/// Classical RK4 on the semi-discrete collocation NLS
///   i c' = A c + S^T diag(kappa |S c|^{2p} + <u, Q>) S c / (N + 1),
/// with S_{jk} = sqrt(2) sin(k pi j/(N+1)), A = diag(k^2 pi^2) + Galerkin(V) supplied.
inline ModalState rk4_collocation_nls(const ModalState& psi0, const nlsctl::ControlSignal& u,
                                      const std::vector<nlsctl::Profile>& Q, const Eigen::MatrixXd& A,
                                      double kappa, int p, double T, int steps) {
  const int N = psi0.truncation();
  Eigen::MatrixXd S(N, N), Qn(N, static_cast<int>(Q.size()));
  for (int j = 1; j <= N; ++j) {
    const double x = static_cast<double>(j) / (N + 1);
    for (int k = 1; k <= N; ++k) S(j - 1, k - 1) = std::sqrt(2.0) * std::sin(k * pi * x);
    for (std::size_t c = 0; c < Q.size(); ++c) Qn(j - 1, static_cast<int>(c)) = Q[c](x);
  }
  const double h = T / steps;
  auto rhs = [&](const Eigen::VectorXcd& c, double t) -> Eigen::VectorXcd {
    const Eigen::VectorXcd g = S * c;
    const Eigen::VectorXd ctrl = Qn * u.at(t);
    Eigen::VectorXcd m(N);
    for (int j = 0; j < N; ++j) m(j) = (kappa * std::pow(std::abs(g(j)), 2 * p) + ctrl(j)) * g(j);
    return cplx(0, -1) * (A * c + S.transpose() * m / static_cast<double>(N + 1));
  };
  Eigen::VectorXcd c = psi0.coeffs;
  for (int n = 0; n < steps; ++n) {
    // u is sampled at the step midpoint for the inner stages, matching the
    // piecewise-constant convention when bins align with steps.
    const double t0 = n * h, tm = t0 + 0.5 * h;
    const Eigen::VectorXcd k1 = rhs(c, tm), k2 = rhs(c + 0.5 * h * k1, tm), k3 = rhs(c + 0.5 * h * k2, tm),
                           k4 = rhs(c + h * k3, tm);
    c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return ModalState(c);
}

inline Eigen::MatrixXd laplacian_diag(int N) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int k = 1; k <= N; ++k) A(k - 1, k - 1) = k * k * pi * pi;
  return A;
}

inline double h3_distance(const ModalState& a, const ModalState& b) { return nlsctl::sobolev_norm(a - b, 3.0); }

}  // namespace testsupport
