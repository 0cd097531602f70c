#include "nlsctl/linear_control.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/kernels.hpp"
#include "nlsctl/moments.hpp"
#include "nlsctl/textio.hpp"

#include <cmath>
#include <ostream>

namespace nlsctl {

using textio::format_double;

void write_gram_report(std::ostream& os, const GramReport& r) {
  os << "rows=" << r.rows << '\n'
     << "cols=" << r.cols << '\n'
     << "sigma_min=" << format_double(r.sigma_min) << '\n'
     << "sigma_max=" << format_double(r.sigma_max) << '\n'
     << "condition=" << format_double(r.sigma_min > 0.0 ? r.sigma_max / r.sigma_min : INFINITY) << '\n'
     << "residual=" << format_double(r.residual) << '\n'
     << "singular_values=";
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
    os << (i ? "," : "") << format_double(r.singular_values(i));
  os << '\n';
}

Eigen::VectorXd h3_row_weights(int N) {
  const Eigen::VectorXd w = sobolev_weights(N, 3.0);
  Eigen::VectorXd d(2 * N);
  d << w, w;
  return d;
}

Eigen::MatrixXd weighted_tangent_basis(const ProblemParams& P, const Eigen::VectorXd& D) {
  const int n = P.N();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * n);
  f.head(n) = P.phi.coeffs.real();
  f = f.array() / D.array();
  f.normalize();
  // Householder completion of f; the trailing columns span its complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(f);
  const Eigen::MatrixXd Qf = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  return Qf.rightCols(2 * n - 1);
}

Eigen::VectorXd truncated_solve(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double rtol,
                                Eigen::VectorXd* singular_values) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (singular_values) *singular_values = s;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  const double cut = rtol * (s.size() ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * b);
}

LinearControlResult solve_linearized_control(const ModalState& xi_target, const ProblemParams& P, int basis_size,
                                             const LinearControlOptions& opts) {
  const int n = P.N(), q = P.q();
  if (xi_target.truncation() != n) throw Error(ErrorCode::ShapeMismatch, "target truncation differs from N");
  if (basis_size < 1) throw Error(ErrorCode::InvalidArgument, "basis_size must be positive");
  if (P.steps() % basis_size != 0)
    throw Error(ErrorCode::TimeGridMismatch, "basis_size must divide the step count");

  const Eigen::MatrixXd J = kernels::linear_io_matrix(P, basis_size);
  const double scale = 1.0 / std::sqrt(P.T() / basis_size);
  const Eigen::VectorXd D = h3_row_weights(n);
  const Eigen::MatrixXd Tw = weighted_tangent_basis(P, D);
  const Eigen::MatrixXd G = Tw.transpose() * D.asDiagonal() * J;

  const Eigen::VectorXd r = to_real(xi_target);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(q * basis_size);
  if (opts.warm_start_mu) {
    const auto sd = single_direction_control(xi_target, P, *opts.warm_start_mu, basis_size);
    for (int c = 0; c < q; ++c)
      for (int l = 0; l < basis_size; ++l) x0(c * basis_size + l) = sd.u.values(l, c) / scale;
  }
  const Eigen::VectorXd rhs = Tw.transpose() * (D.asDiagonal() * (r - J * x0));

  LinearControlResult out;
  GramReport& rep = out.report;
  const Eigen::VectorXd x = x0 + truncated_solve(G, rhs, opts.rtol, &rep.singular_values);
  rep.rows = static_cast<int>(G.rows());
  rep.cols = static_cast<int>(G.cols());
  rep.sigma_max = rep.singular_values.size() ? rep.singular_values(0) : 0.0;
  rep.sigma_min = rep.singular_values.size() ? rep.singular_values(rep.singular_values.size() - 1) : 0.0;

  const Eigen::VectorXd miss = D.asDiagonal() * (J * x - r);
  const double rn = (D.asDiagonal() * r).norm();
  rep.residual = rn > 0.0 ? miss.norm() / rn : miss.norm();

  {
    // Unweighted tangent-projected map for the weakest reachable direction.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2 * n);
    const Eigen::MatrixXd T0 = weighted_tangent_basis(P, ones);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T0.transpose() * J, Eigen::ComputeFullU);
    const Eigen::VectorXd y = T0 * svd.matrixU().col(T0.cols() - 1);
    rep.weakest_direction = from_real(y);
  }

  Eigen::MatrixXd values(basis_size, q);
  for (int c = 0; c < q; ++c)
    for (int l = 0; l < basis_size; ++l) values(l, c) = scale * x(c * basis_size + l);
  out.v = ControlSignal::uniform(P.T(), values);

  if (rep.residual > opts.residual_tol) {
    out.deficient = true;
    const Eigen::VectorXd u = (miss.array() / D.array()).matrix();
    out.unreachable = from_real(u / u.norm());
    if (opts.throw_on_deficient)
      throw Error(ErrorCode::ControlDeficient, "relative residual " + format_double(rep.residual) +
                                                   " above " + format_double(opts.residual_tol));
  }
  return out;
}

}  // namespace nlsctl
