#include "nlsctl/sampling.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/steering.hpp"

namespace nlsctl {

ModalState random_modal(int N, int kmax, std::mt19937_64& rng) {
  if (kmax < 1 || kmax > N) throw Error(ErrorCode::InvalidArgument, "kmax outside 1..N");
  std::normal_distribution<double> nd;
  ModalState s = ModalState::zero(N);
  for (int k = 1; k <= kmax; ++k) {
    const double re = nd(rng);
    s(k) = cplx(re, nd(rng));
  }
  return s;
}

ModalState random_tangent(const ProblemParams& P, int kmax, double h3_norm, std::mt19937_64& rng) {
  const ModalState e = random_modal(P.N(), kmax, rng);
  ModalState s(P.op.eigenvectors.cast<cplx>() * e.coeffs);
  s.coeffs -= inner_l2(s, P.phi) * P.phi.coeffs;
  const double n3 = sobolev_norm(s, 3.0);
  s *= h3_norm / n3;
  return s;
}

ModalState random_unit_near_phi(const ProblemParams& P, double radius, std::mt19937_64& rng) {
  // Normalizing phi + d moves the state by at most |d| in H^3 to first order;
  // the slack keeps the distance inside the radius.
  const ModalState d = random_modal(P.N(), P.N(), rng);
  ModalState s = perturbed_ground_state(P, d, 0.9 * radius);
  return s;
}

ControlSignal random_control(double T, int bins, int channels, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd v(bins, channels);
  for (int c = 0; c < channels; ++c)
    for (int l = 0; l < bins; ++l) v(l, c) = scale * nd(rng);
  return ControlSignal::uniform(T, v);
}

}  // namespace nlsctl
