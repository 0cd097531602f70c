#include "nlsctl/moments.hpp"

#include "nlsctl/error.hpp"

#include <cmath>

namespace nlsctl {

namespace {

constexpr double kZeroFreq = 1e-12;

// int_a^b exp(i w s) ds written around the midpoint.
cplx bin_integral(double w, double a, double b) {
  const double half = 0.5 * (b - a);
  const double x = w * half;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return std::exp(cplx(0.0, w * 0.5 * (a + b))) * (2.0 * half * sinc);
}

}  // namespace

Eigen::VectorXd MomentSpec::gaps() const {
  const int K = size();
  Eigen::VectorXd g(std::max(0, K - 1));
  for (int k = 1; k < K; ++k) g(k - 1) = frequencies(k) - frequencies(k - 1);
  return g;
}

MomentSpec moments_from_target(const ModalState& xi_target, const SpectralOperator& op, const SampledField& mu,
                               double T, int K, double zero_tol) {
  const int n = op.truncation();
  if (xi_target.truncation() != n) throw Error(ErrorCode::ShapeMismatch, "target truncation differs from N");
  if (K < 1 || K > n) throw Error(ErrorCode::InvalidArgument, "K outside 1..N");
  const Eigen::VectorXd c = mu_couplings(mu, op);
  // int xi phi_k with real phi_k
  const Eigen::VectorXcd d = op.eigenvectors.transpose().cast<cplx>() * xi_target.coeffs;
  MomentSpec s;
  s.T = T;
  s.frequencies.resize(K);
  s.targets.resize(K);
  const double lambda = op.eigenvalue(1);
  for (int k = 0; k < K; ++k) {
    if (std::abs(c(k)) < zero_tol)
      throw Error(ErrorCode::DivisionByStructuralZero,
                  "<mu phi, phi_k> vanishes at k = " + std::to_string(k + 1));
    const double w = op.eigenvalues(k) - lambda;
    s.frequencies(k) = w;
    s.targets(k) = cplx(0.0, 1.0) * std::exp(cplx(0.0, w * T)) * d(k) / c(k);
  }
  return s;
}

MomentSolution solve_moment_problem(const MomentSpec& spec, int m_ctrl, double ridge) {
  const int K = spec.size();
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "empty moment spec");
  if (m_ctrl < 4 * K)
    throw Error(ErrorCode::InvalidArgument, "m_ctrl = " + std::to_string(m_ctrl) + " below 4K = " +
                                                std::to_string(4 * K));
  if (ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge must be nonnegative");
  const double T = spec.T;
  const double dt = T / m_ctrl;

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int k = 0; k < K; ++k) {
    const double w = spec.frequencies(k);
    Eigen::RowVectorXd re(m_ctrl), im(m_ctrl);
    for (int j = 0; j < m_ctrl; ++j) {
      const cplx I = bin_integral(w, j * dt, (j + 1) * dt);
      re(j) = I.real();
      im(j) = I.imag();
    }
    rows.push_back(re);
    rhs.push_back(spec.targets(k).real());
    if (std::abs(w) > kZeroFreq) {
      rows.push_back(im);
      rhs.push_back(spec.targets(k).imag());
    }
  }
  Eigen::MatrixXd A(rows.size(), m_ctrl);
  Eigen::VectorXd b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(r) = rows[r];
    b(r) = rhs[r];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin >= 1e-12 * smax))
    throw Error(ErrorCode::IllPosed, "moment matrix singular (sigma_min/sigma_max = " +
                                         std::to_string(smin / smax) + "); increase T or decrease K");
  Eigen::VectorXd filt(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) filt(i) = sv(i) / (sv(i) * sv(i) + ridge);
  const Eigen::VectorXd x = svd.matrixV() * filt.asDiagonal() * (svd.matrixU().transpose() * b);

  MomentSolution out;
  out.v = ControlSignal::uniform(T, x);
  out.singular_values = sv;
  out.residuals = verify_moments(out.v, spec);
  return out;
}

Eigen::VectorXd verify_moments(const ControlSignal& v, const MomentSpec& spec) {
  if (v.channels() != 1) throw Error(ErrorCode::ShapeMismatch, "moment check needs a scalar control");
  const int K = spec.size();
  Eigen::VectorXd r(K);
  for (int k = 0; k < K; ++k) {
    const double w = spec.frequencies(k);
    cplx acc = 0.0;
    for (int j = 0; j < v.intervals(); ++j) {
      const double a = v.times(j), b = v.times(j + 1);
      const cplx I = std::abs(w) < kZeroFreq
                         ? cplx(b - a, 0.0)
                         : (std::exp(cplx(0.0, w * b)) - std::exp(cplx(0.0, w * a))) / cplx(0.0, w);
      acc += v.values(j, 0) * I;
    }
    r(k) = std::abs(acc - spec.targets(k));
  }
  return r;
}

ProblemParams without_w(const ProblemParams& params) {
  ProblemParams P = params;
  P.setup.W = profiles::zero();
  P.W = SampledField(Eigen::VectorXd::Zero(P.M + 1));
  P.Wm.setZero();
  P.warnings.clear();
  return P;
}

SingleDirectionResult single_direction_control(const ModalState& xi_target, const ProblemParams& params,
                                               const Profile& mu, int m_ctrl, double ridge) {
  const int n = params.N();
  const int q = params.q();
  if (xi_target.truncation() != n) throw Error(ErrorCode::ShapeMismatch, "target truncation differs from N");
  if (q < 1) throw Error(ErrorCode::NotInControlSpan, "empty control family");

  const SampledField mus = mu.sample(params.M);
  Eigen::MatrixXd Qm(params.M + 1, q);
  for (int c = 0; c < q; ++c) Qm.col(c) = params.Q[c].values;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  SingleDirectionResult out;
  out.alpha = svd.solve(mus.values);
  const double span_res = (Qm * out.alpha - mus.values).cwiseAbs().maxCoeff();
  if (span_res > 1e-10)
    throw Error(ErrorCode::NotInControlSpan, "mu '" + mu.name() + "' lies outside span(Q) (residual " +
                                                 std::to_string(span_res) + ")");

  // Target in eigen-coordinates; modes beyond the trusted range are dropped.
  const SpectralOperator& op = params.op;
  const int K = op.trusted_count();
  Eigen::VectorXcd d = op.eigenvectors.transpose().cast<cplx>() * xi_target.coeffs;
  out.tail_norm = d.tail(n - K).norm();
  out.tail_ignored = out.tail_norm > 1e-10;
  d.tail(n - K).setZero();
  const ModalState trimmed(op.eigenvectors.cast<cplx>() * d);

  // All N moments are imposed so that untrusted modes land at zero.
  const MomentSpec spec = moments_from_target(trimmed, op, mus, params.T(), n);
  const MomentSolution sol = solve_moment_problem(spec, m_ctrl, ridge);
  out.moment_residuals = sol.residuals;
  out.u = ControlSignal(sol.v.times, sol.v.values * out.alpha.transpose());

  const ProblemParams P0 = without_w(params);
  const ModalState reached = propagate_linear_terminal(ModalState::zero(n), out.u, P0);
  const double tn = sobolev_norm(trimmed, 3.0);
  const double err = sobolev_norm(reached - trimmed, 3.0);
  out.terminal_error = tn > 0.0 ? err / tn : err;
  return out;
}

}  // namespace nlsctl
