#include "nlsctl/kernels.hpp"

#include "nlsctl/error.hpp"

#include <cmath>
#include <numbers>

namespace nlsctl::kernels {

using std::numbers::pi;

namespace {

int bin_of(double t, double T, int bins) {
  const int l = static_cast<int>(std::floor(t / T * bins));
  return std::clamp(l, 0, bins - 1);
}

SampledField kappa_potential(double kappa, int M) {
  return profiles::phi1_sq().affine(2.0 * kappa, -pi * pi).sample(M);
}

}  // namespace

Eigen::MatrixXd linear_io_matrix(const ProblemParams& P, int bins, Exec exec) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be positive");
  const int n = P.N(), q = P.q(), steps = P.steps();
  const double h = P.dt();
  const double T = P.T();
  const double scale = 1.0 / std::sqrt(T / bins);
  const LinearStep st = linear_step(P, h);
  const int cols = q * bins;
  Eigen::MatrixXd out(2 * n, cols);

  auto column = [&](int col) {
    const int c = col / bins, l = col % bins;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
    for (int s = 0; s < steps; ++s) {
      x = st.Phi * x;
      if (bin_of((s + 0.5) * h, T, bins) == l) x += scale * st.Gamma.col(c);
    }
    out.col(col) = x;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int col = 0; col < cols; ++col) column(col);
  } else {
    for (int col = 0; col < cols; ++col) column(col);
  }
  return out;
}

Eigen::MatrixXd nls_jacobian(const Trajectory& around, const ProblemParams& P, int bins, Exec exec) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be positive");
  const int n = P.N(), q = P.q();
  const int steps = around.steps();
  const double T = P.T();
  if (steps < 1 || std::abs(around.T - T) > 1e-12 * std::max(1.0, T))
    throw Error(ErrorCode::TimeGridMismatch, "trajectory does not match the problem horizon");
  const double h = T / steps;

  const Eigen::MatrixXcd K = kinetic_half_step(P, h);
  const CollocationGrid g = collocation_grid(P);
  const Eigen::MatrixXcd Sg = g.S.cast<cplx>();
  const Eigen::MatrixXcd SgT = g.S.transpose().cast<cplx>() / static_cast<double>(n + 1);
  const double kappa = P.kappa();
  const int p = P.p();

  // Real-linear probe directions e_k and i e_k.
  Eigen::MatrixXcd probe(n, 2 * n);
  probe.leftCols(n) = Eigen::MatrixXcd::Identity(n, n);
  probe.rightCols(n) = cplx(0.0, 1.0) * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd grid_probe = Sg * K * probe;

  std::vector<Eigen::MatrixXd> A(steps), B(steps);
  auto step = [&](int s) {
    const Eigen::VectorXcd chi = Sg * (K * around.snapshots[s].coeffs);
    const Eigen::VectorXd uq = g.Q * around.control.at((s + 0.5) * h);
    Eigen::MatrixXcd e = grid_probe;
    Eigen::MatrixXcd src(n, q);
    for (int j = 0; j < n; ++j) {
      const double r2 = std::norm(chi(j));
      const cplx rot = std::exp(cplx(0.0, -h * (kappa * std::pow(r2, p) + uq(j))));
      const double w = 2.0 * p * kappa * std::pow(r2, p - 1);
      for (int k = 0; k < 2 * n; ++k) {
        const double dtheta = w * (std::conj(chi(j)) * e(j, k)).real();
        e(j, k) = rot * (e(j, k) - cplx(0.0, h) * chi(j) * dtheta);
      }
      for (int c = 0; c < q; ++c) src(j, c) = rot * cplx(0.0, -h) * chi(j) * g.Q(j, c);
    }
    const Eigen::MatrixXcd ea = K * (SgT * e);
    const Eigen::MatrixXcd sa = K * (SgT * src);
    A[s].resize(2 * n, 2 * n);
    A[s].topRows(n) = ea.real();
    A[s].bottomRows(n) = ea.imag();
    B[s].resize(2 * n, q);
    B[s].topRows(n) = sa.real();
    B[s].bottomRows(n) = sa.imag();
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int s = 0; s < steps; ++s) step(s);
  } else {
    for (int s = 0; s < steps; ++s) step(s);
  }

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, q * bins);
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int s = steps - 1; s >= 0; --s) {
    const int l = bin_of((s + 0.5) * h, T, bins);
    const Eigen::MatrixXd GB = G * B[s];
    for (int c = 0; c < q; ++c) J.col(c * bins + l) += GB.col(c);
    G = G * A[s];
  }
  return J;
}

Eigen::VectorXd kappa_eigenvalues(double kappa, int k_max, int N) {
  const SpectralOperator op = build_operator(kappa_potential(kappa, 4 * N), N);
  return op.eigenvalues.head(k_max);
}

std::vector<KappaSample> kappa_samples(const std::vector<double>& kappas, int k_max, int N, double fd_step,
                                       Exec exec) {
  if (k_max < 1 || k_max > std::max(1, N / 2))
    throw Error(ErrorCode::InvalidArgument, "k_max must lie in the trusted range 1..N/2");
  const int M = 4 * N;
  const Eigen::MatrixXd G2 = galerkin_matrix(profiles::phi1_sq().affine(2.0, 0.0).sample(M), N);
  std::vector<KappaSample> out(kappas.size());

  auto one = [&](std::size_t i) {
    KappaSample& r = out[i];
    r.kappa = kappas[i];
    const SpectralOperator op = build_operator(kappa_potential(r.kappa, M), N);
    r.lambda = op.eigenvalues.head(k_max);
    const Eigen::VectorXd up = kappa_eigenvalues(r.kappa + fd_step, k_max, N);
    const Eigen::VectorXd dn = kappa_eigenvalues(r.kappa - fd_step, k_max, N);
    r.dlambda_fd = (up - dn) / (2.0 * fd_step);
    r.dlambda_hf.resize(k_max);
    for (int k = 0; k < k_max; ++k) {
      const Eigen::VectorXd v = op.eigenvectors.col(k);
      r.dlambda_hf(k) = v.dot(G2 * v);
    }
  };

  const auto count = static_cast<long>(kappas.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < count; ++i) one(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace nlsctl::kernels
