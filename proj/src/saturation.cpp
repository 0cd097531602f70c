#include "nlsctl/saturation.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlsctl {

using std::numbers::pi;

Eigen::MatrixXd generator_matrix(const ProblemParams& P) {
  const int n = P.N();
  // i((H + Wm) a + i H b) = -H b + i (H + Wm) a
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  F.block(0, n, n, n) = -P.H;
  F.block(n, 0, n, n) = P.H + P.Wm;
  return F;
}

ModalState apply_generator(const ModalState& g, const ProblemParams& P) {
  if (g.truncation() != P.N()) throw Error(ErrorCode::ShapeMismatch, "state truncation differs from N");
  const Eigen::VectorXd a = g.coeffs.real(), b = g.coeffs.imag();
  Eigen::VectorXcd out(P.N());
  out.real() = -P.H * b;
  out.imag() = P.H * a + P.Wm * a;
  return ModalState(std::move(out));
}

Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& columns, double tol) {
  if (columns.cols() == 0) return Eigen::MatrixXd(columns.rows(), 0);
  Eigen::MatrixXd C = columns;
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    const double nj = C.col(j).norm();
    if (nj > 0.0) C.col(j) /= nj;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  int r = 0;
  const double cut = tol * (s.size() ? s(0) : 0.0);
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  return svd.matrixU().leftCols(r);
}

SaturationLadder build_ladder(const ProblemParams& P, int j_max, double tol) {
  const int n = P.N();
  Eigen::MatrixXd level0 = Eigen::MatrixXd::Zero(2 * n, P.q());
  level0.topRows(n) = P.S;
  return build_ladder(P, level0, j_max, tol);
}

namespace {

// Orthonormal basis of span(M) without rescaling columns. M is the image of
// unit vectors, so singular values below tol * max(1, largest) are dropped.
Eigen::MatrixXd unscaled_span(const Eigen::MatrixXd& M, double tol) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s(0));
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// [B, new directions of `images`]. B is kept as is, so levels nest exactly.
// Images are measured against B's unit columns: an image that vanishes up to
// roundoff (e.g. F phi when W = 0) adds nothing.
Eigen::MatrixXd extend_span(const Eigen::MatrixXd& B, const Eigen::MatrixXd& images, double tol) {
  if (B.cols() == 0) return B;
  Eigen::MatrixXd R = images;
  for (int pass = 0; pass < 2; ++pass) R -= B * (B.transpose() * R);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  Eigen::MatrixXd out(B.rows(), B.cols() + r);
  out << B, svd.matrixU().leftCols(r);
  return out;
}

}  // namespace

SaturationLadder build_ladder(const ProblemParams& P, const Eigen::MatrixXd& level0, int j_max, double tol) {
  if (level0.rows() != 2 * P.N()) throw Error(ErrorCode::ShapeMismatch, "level-0 vectors must have 2N rows");
  if (j_max < 0) throw Error(ErrorCode::InvalidArgument, "j_max must be nonnegative");
  const Eigen::MatrixXd F = generator_matrix(P);
  const double fnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(F).singularValues()(0);
  SaturationLadder L;
  L.levels.push_back(orthonormal_span(level0, tol));
  L.ranks.push_back(static_cast<int>(L.levels.back().cols()));
  for (int j = 1; j <= j_max; ++j) {
    const Eigen::MatrixXd& B = L.levels.back();
    L.levels.push_back(fnorm > 0.0 ? extend_span(B, F * B / fnorm, tol) : B);
    L.ranks.push_back(static_cast<int>(L.levels.back().cols()));
    const std::size_t m = L.ranks.size();
    if (m >= 3 && L.ranks[m - 1] == L.ranks[m - 2] && L.ranks[m - 2] == L.ranks[m - 3]) {
      L.stabilized = true;
      break;
    }
    // Nothing left to add once the whole space is reached.
    if (L.ranks.back() == 2 * P.N() && m >= 3) {
      L.stabilized = true;
      break;
    }
  }
  return L;
}

Eigen::MatrixXd tangent_projector_h3(const ProblemParams& P) {
  const int n = P.N();
  const Eigen::VectorXd phi = P.phi.coeffs.real();
  const Eigen::VectorXd w3 = sobolev_weights(n, 6.0);  // (k pi)^6
  const Eigen::VectorXd z = phi.array() / w3.array();   // A^{-3} phi
  Eigen::VectorXd zr = Eigen::VectorXd::Zero(2 * n), fr = Eigen::VectorXd::Zero(2 * n);
  zr.head(n) = z;
  fr.head(n) = phi;
  return Eigen::MatrixXd::Identity(2 * n, 2 * n) - zr * fr.transpose() / z.dot(phi);
}

SaturationVerdict saturation_verdict(const SaturationLadder& L, const ProblemParams& P, double tol) {
  const int n = P.N();
  SaturationVerdict v;
  v.target = 2 * n - 1;
  v.partial = !L.stabilized;
  const Eigen::MatrixXd B = L.levels.empty() ? Eigen::MatrixXd(2 * n, 0) : L.levels.back();
  const Eigen::MatrixXd reached = unscaled_span(tangent_projector_h3(P) * B, tol);
  v.dimension = static_cast<int>(reached.cols());
  v.codim = v.target - v.dimension;
  v.saturating = v.codim == 0;
  if (v.codim == 1) {
    Eigen::MatrixXd cols(2 * n, reached.cols() + 1);
    cols.leftCols(reached.cols()) = reached;
    cols.col(reached.cols()).setZero();
    cols.col(reached.cols()).head(n) = P.phi.coeffs.real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeFullU);
    v.missed = from_real(svd.matrixU().col(2 * n - 1));
  }
  return v;
}

double direction_angle(const ModalState& a, const ModalState& b) {
  const Eigen::VectorXd x = to_real(a), y = to_real(b);
  const double c = std::abs(x.dot(y)) / (x.norm() * y.norm());
  return std::acos(std::min(1.0, c));
}

KappaSweepResult kappa_sweep(int k_max, double kappa_lo, double kappa_hi, int samples, int N, double fd_step,
                             double bisect_tol) {
  if (!(kappa_lo < kappa_hi)) throw Error(ErrorCode::InvalidArgument, "kappa_lo must be below kappa_hi");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two kappa samples");
  KappaSweepResult R;
  for (int i = 0; i < samples; ++i)
    R.kappa_grid.push_back(kappa_lo + (kappa_hi - kappa_lo) * i / (samples - 1));
  const auto data = kernels::kappa_samples(R.kappa_grid, k_max, N, fd_step);
  R.lambda.resize(samples, k_max);
  R.dlambda_fd.resize(samples, k_max);
  R.dlambda_hf.resize(samples, k_max);
  for (int i = 0; i < samples; ++i) {
    R.lambda.row(i) = data[i].lambda.transpose();
    R.dlambda_fd.row(i) = data[i].dlambda_fd.transpose();
    R.dlambda_hf.row(i) = data[i].dlambda_hf.transpose();
  }
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < k_max; ++k) {
      const double hf = R.dlambda_hf(i, k);
      R.max_hf_rel_error = std::max(R.max_hf_rel_error, std::abs(R.dlambda_fd(i, k) - hf) / std::abs(hf));
      if (i > 0 && !(R.lambda(i, k) > R.lambda(i - 1, k))) R.strictly_increasing = false;
    }

  constexpr double zero_tol = 1e-12;
  for (int k = 0; k < k_max; ++k) {
    auto f = [&](double kap) { return kernels::kappa_eigenvalues(kap, k + 1, N)(k); };
    for (int i = 0; i < samples; ++i) {
      const double li = R.lambda(i, k);
      if (std::abs(li) < zero_tol) {
        R.crossings.push_back({k + 1, R.kappa_grid[i], std::abs(li)});
        continue;
      }
      if (i + 1 >= samples) continue;
      const double lj = R.lambda(i + 1, k);
      if (std::abs(lj) < zero_tol || (li > 0) == (lj > 0)) continue;
      double a = R.kappa_grid[i], b = R.kappa_grid[i + 1], fa = li;
      while (b - a > bisect_tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double ks = 0.5 * (a + b);
      R.crossings.push_back({k + 1, ks, std::abs(f(ks))});
    }
  }
  std::sort(R.crossings.begin(), R.crossings.end(), [](const Crossing& x, const Crossing& y) {
    return x.kappa_star != y.kappa_star ? x.kappa_star < y.kappa_star : x.k < y.k;
  });
  return R;
}

}  // namespace nlsctl
