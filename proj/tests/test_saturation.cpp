#include "doctest.h"
#include "support.hpp"

#include "nlsctl/saturation.hpp"

using namespace nlsctl;
using namespace testsupport;

namespace {

ProblemParams setup_params(double kappa, std::vector<Profile> Q, int N = 16, Profile W = Profile()) {
  ProblemSetup s;
  s.kappa = kappa;
  s.N = N;
  s.Q = std::move(Q);
  s.W = std::move(W);
  return make_params(s);
}

/// Closed form of 2 kappa phi_1^2 phi_m = 2 kappa phi_m - kappa (phi_{m+2} + phi_{m-2}), phi_{-1} = -phi_1.
ModalState w_times_mode(double kappa, int m, int N) {
  ModalState s = ModalState::zero(N);
  s(m) += 2 * kappa;
  if (m + 2 <= N) s(m + 2) -= kappa;
  if (m >= 3) s(m - 2) -= kappa;
  if (m == 1) s(1) += kappa;
  return s;
}

double c_coef(int k) { return pi * pi * (k * k - 1.0); }

Eigen::MatrixXd stacked(const std::vector<ModalState>& states) {
  Eigen::MatrixXd M(2 * states.front().truncation(), static_cast<int>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) M.col(static_cast<int>(j)) = to_real(states[j]);
  return M;
}

}  // namespace

TEST_SUITE("saturation") {

TEST_CASE("generator on odd modes matches the closed-form ladder") {
  const double kappa = 0.5;
  const auto P = setup_params(kappa, {profiles::one(), profiles::cos_pi()});
  for (int m = 1; m + 2 <= 16; m += 2) {
    const ModalState got = apply_generator(ModalState::basis(16, m), P);
    ModalState expect = ModalState::basis(16, m, c_coef(m)) + w_times_mode(kappa, m, 16);
    expect *= cplx(0, 1);
    CHECK((got - expect).coeffs.cwiseAbs().maxCoeff() < 1e-9 * c_coef(m + 2));
  }
  // c_{2N-1} = pi^2((2N-1)^2 - 1) for the diagonal part.
  CHECK(c_coef(31) == doctest::Approx(pi * pi * (31.0 * 31.0 - 1.0)));
}

TEST_CASE("phi_1^2 phi_3 identity by quadrature") {
  const int M = 256, N = 32;
  const Eigen::VectorXd p1 = modal_to_grid(ModalState::basis(N, 1), M).real();
  const Eigen::VectorXd p3 = modal_to_grid(ModalState::basis(N, 3), M).real();
  const Eigen::VectorXd c = project_real(p1.cwiseProduct(p1).cwiseProduct(p3), N);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(N);
  expect(2) = 1.0;
  expect(0) = -0.5;
  expect(4) = -0.5;
  CHECK((c - expect).cwiseAbs().maxCoeff() < 1e-12);
  const double direct = simpson([](double x) {
    const double s1 = std::sqrt(2.0) * std::sin(pi * x);
    return s1 * s1 * std::sqrt(2.0) * std::sin(3 * pi * x) * std::sqrt(2.0) * std::sin(5 * pi * x);
  });
  CHECK(std::abs(direct + 0.5) < 1e-10);
}

TEST_CASE("double generator application lands on the next odd mode with kappa c_{m+2}") {
  const double kappa = 0.5;
  const auto P = setup_params(kappa, {profiles::one(), profiles::cos_pi()});
  for (int m = 1; m + 2 <= 16; m += 2) {
    const ModalState g2 = apply_generator(apply_generator(ModalState::basis(16, m), P), P);
    CHECK(std::abs(g2(m + 2) - kappa * c_coef(m + 2)) < 1e-9 * std::abs(kappa * c_coef(m + 2)));
    CHECK(std::abs(g2(m + 2) - 0.5 * c_coef(m + 2)) < 1e-9 * c_coef(m + 2));
  }
}

TEST_CASE("generator annihilates the ground mode when W = 0") {
  const auto P = setup_params(0.5, {profiles::one()}, 16, profiles::zero());
  CHECK(apply_generator(ModalState::basis(16, 1), P).coeffs.norm() < 1e-10);
}

TEST_CASE("W = 0 generator is diagonal in the eigenbasis") {
  for_all(10, 97, [](Gen& g, int) {
    ProblemSetup s;
    s.V = g.trig_potential(3);
    s.W = profiles::zero();
    const auto P = make_params(s);
    for (int k = 1; k <= 8; ++k) {
      const ModalState e = P.op.eigenstate(k);
      const ModalState expect = cplx(0, P.op.eigenvalue(k) - P.lambda) * e;
      CHECK((apply_generator(e, P) - expect).coeffs.norm() < 1e-10 * (1 + std::abs(P.op.eigenvalue(k))));
    }
  });
}

TEST_CASE("generator matrix agrees with apply_generator") {
  const auto P = setup_params(0.7, {profiles::one(), profiles::cos_pi()});
  const Eigen::MatrixXd F = generator_matrix(P);
  for_all(10, 89, [&](Gen& g, int) {
    const ModalState s = g.state(16, 16);
    CHECK((F * to_real(s) - to_real(apply_generator(s, P))).norm() < 1e-9 * F.norm() * s.coeffs.norm());
  });
}

TEST_CASE("level 0 for Q = (1, cos pi x) is span{phi_1, phi_2}") {
  const auto P = setup_params(0.5, {profiles::one(), profiles::cos_pi()});
  const auto L = build_ladder(P, 20);
  REQUIRE(L.ranks.size() >= 1);
  CHECK(L.ranks[0] == 2);
  const Eigen::MatrixXd target = stacked({ModalState::basis(16, 1), ModalState::basis(16, 2)});
  const Eigen::MatrixXd& B = L.levels[0];
  CHECK((target - B * (B.transpose() * target)).norm() < 1e-12);
}

TEST_CASE("W = 0 ladder from (1, cos pi x) stops at rank 3") {
  // Diagonal generator: phi_1 is annihilated, phi_2 rotates into i phi_2 and back.
  const auto P = setup_params(0.0, {profiles::one(), profiles::cos_pi()});
  const auto L = build_ladder(P, 20);
  CHECK(L.stabilized);
  CHECK(L.ranks.back() == 3);
  const auto v = saturation_verdict(L, P);
  CHECK_FALSE(v.saturating);
  CHECK(v.codim == 2 * 16 - 1 - v.dimension);
}

TEST_CASE("constant control alone without W stalls at phi_1") {
  const auto P = setup_params(0.5, {profiles::one()}, 16, profiles::zero());
  const auto L = build_ladder(P, 20);
  CHECK(L.ranks.back() == 1);
  const auto v = saturation_verdict(L, P);
  CHECK_FALSE(v.saturating);
  CHECK(v.dimension == 0);
  CHECK(v.codim == 2 * 16 - 1);
}

TEST_CASE("empty level 0 is not saturating") {
  const auto P = setup_params(0.5, {profiles::one()});
  const auto L = build_ladder(P, Eigen::MatrixXd(32, 0), 5);
  const auto v = saturation_verdict(L, P);
  CHECK_FALSE(v.saturating);
  CHECK(v.codim == 31);
}

TEST_CASE("Q = (1, cos pi x) saturates at kappa = 0.5") {
  const auto P = setup_params(0.5, {profiles::one(), profiles::cos_pi()});
  const auto L = build_ladder(P, 40);
  const auto v = saturation_verdict(L, P);
  CHECK(v.saturating);
  CHECK(v.codim == 0);
  CHECK(v.dimension == 31);
  CHECK_FALSE(v.partial);
  CHECK_FALSE(v.missed.has_value());
}

TEST_CASE("ladder from {phi_1, phi_2} reaches the tangent dimension within N levels") {
  const auto P = setup_params(0.5, {profiles::one(), profiles::cos_pi()});
  const auto L = build_ladder(P, stacked({ModalState::basis(16, 1), ModalState::basis(16, 2)}), 40);
  const auto v = saturation_verdict(L, P);
  CHECK(v.dimension == 31);
  int first_full = -1;
  for (std::size_t j = 0; j < L.ranks.size(); ++j)
    if (L.ranks[j] >= 31 && first_full < 0) first_full = static_cast<int>(j);
  CHECK(first_full >= 0);
  CHECK(first_full <= 16);
}

TEST_CASE("ladder levels are nested and ranks nondecreasing") {
  for_all(6, 131, [](Gen& g, int) {
    std::vector<Profile> pool = {profiles::one(), profiles::cos_pi(), profiles::cos_2pi(), profiles::x_sq(),
                                 profiles::x()};
    std::vector<Profile> Q;
    for (auto& p : pool)
      if (g.uniform(0, 1) < 0.5) Q.push_back(p);
    if (Q.empty()) Q.push_back(profiles::one());
    const auto P = setup_params(g.uniform(-2, 2), Q, 12);
    const auto L = build_ladder(P, 30);
    for (std::size_t j = 1; j < L.levels.size(); ++j) {
      CHECK(L.ranks[j] >= L.ranks[j - 1]);
      const Eigen::MatrixXd& A = L.levels[j - 1];
      const Eigen::MatrixXd& B = L.levels[j];
      CHECK((A - B * (B.transpose() * A)).norm() < 1e-10);
      CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(B.cols(), B.cols())).norm() < 1e-10);
    }
  });
}

TEST_CASE("H3 tangent projector") {
  const auto P = setup_params(0.5, {profiles::one()});
  const Eigen::MatrixXd P1 = tangent_projector_h3(P);
  CHECK((P1 * P1 - P1).norm() < 1e-10);
  const Eigen::VectorXd f = to_real(P.phi);
  CHECK((f.transpose() * P1).norm() < 1e-10 * P1.norm());
  for_all(5, 3, [&](Gen& g, int) {
    const ModalState s = g.state(16, 16);
    CHECK(std::abs(inner_l2(from_real(P1 * to_real(s)), P.phi)) < 1e-10 * sobolev_norm(s, 3.0));
  });
}

// Level 0 already carries i Q_j phi_1, whose i phi_k component is nonzero for
// this Q, so the ladder recovers the direction the generator loses.
TEST_CASE("codimension one at a negative crossing with the missed direction i phi_k" * doctest::should_fail()) {
  const auto sweep = kappa_sweep(3, -30.0, 0.0, 61, 32);
  const Crossing* neg = nullptr;
  for (const auto& c : sweep.crossings)
    if (c.kappa_star < -1e-6) neg = &c;
  REQUIRE(neg != nullptr);
  const auto P = setup_params(neg->kappa_star, {profiles::one(), profiles::cos_pi(), profiles::cos_2pi(), profiles::x_sq()});
  const auto v = saturation_verdict(build_ladder(P, 40), P);
  CHECK(v.codim == 1);
  REQUIRE(v.missed.has_value());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa_operator(neg->kappa_star, 16));
  const Eigen::VectorXd ev = es.eigenvalues();
  int idx = 0;
  ev.cwiseAbs().minCoeff(&idx);
  CHECK(idx == neg->k - 1);
  const ModalState iphik = cplx(0, 1) * ModalState::from_real(es.eigenvectors().col(idx));
  MESSAGE("angle " << direction_angle(*v.missed, iphik));
  CHECK(direction_angle(*v.missed, iphik) < 1e-3);
}

TEST_CASE("at a negative crossing i phi_k leaves the range of the generator") {
  const auto sweep = kappa_sweep(3, -30.0, 0.0, 61, 16);
  const Crossing* neg = nullptr;
  for (const auto& c : sweep.crossings)
    if (c.kappa_star < -1e-6) neg = &c;
  REQUIRE(neg != nullptr);
  const auto P = setup_params(neg->kappa_star, {profiles::one()});
  const Eigen::MatrixXd F = generator_matrix(P);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa_operator(neg->kappa_star, 16));
  int idx = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&idx);
  const Eigen::VectorXd d = to_real(cplx(0, 1) * ModalState::from_real(es.eigenvectors().col(idx)));
  CHECK((F.transpose() * d).norm() < 1e-8 * F.norm());
  // The saturation verdict still reaches the full tangent space.
  const auto full = setup_params(neg->kappa_star, {profiles::one(), profiles::cos_pi(), profiles::cos_2pi(), profiles::x_sq()});
  CHECK(saturation_verdict(build_ladder(full, 40), full).codim == 0);
}

TEST_CASE("kappa sweep on [-30, 0]") {
  const auto r = kappa_sweep(3, -30.0, 0.0, 61, 32);
  CHECK(r.strictly_increasing);
  CHECK(r.max_hf_rel_error < 1e-5);
  bool found_zero = false;
  for (std::size_t i = 0; i < r.crossings.size(); ++i) {
    const auto& c = r.crossings[i];
    CHECK(c.kappa_star <= 0.0);
    if (i > 0) CHECK(r.crossings[i - 1].kappa_star <= c.kappa_star);
    if (c.k == 1 && std::abs(c.kappa_star) < 1e-8) found_zero = true;
  }
  CHECK(found_zero);
  CHECK(r.crossings.size() < 10u);
  // dlambda_1/dkappa at kappa = 0 equals 8 int sin^4 = 3.
  const int last = static_cast<int>(r.kappa_grid.size()) - 1;
  REQUIRE(std::abs(r.kappa_grid[last]) < 1e-14);
  CHECK(std::abs(r.dlambda_hf(last, 0) - 3.0) < 1e-6);
  CHECK(std::abs(r.dlambda_fd(last, 0) - 3.0) < 1e-6);
  CHECK(std::abs(8.0 * simpson([](double x) { return std::pow(std::sin(pi * x), 4); }) - 3.0) < 1e-12);
}

TEST_CASE("tracks are strictly increasing sample to sample") {
  const auto r = kappa_sweep(3, -30.0, 0.0, 61, 32);
  for (int i = 1; i < r.lambda.rows(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(r.lambda(i, k) > r.lambda(i - 1, k));
}

TEST_CASE("no crossings for positive kappa") {
  const auto r = kappa_sweep(3, 0.1, 10.0, 21, 32);
  CHECK(r.crossings.empty());
  CHECK(r.lambda.minCoeff() > 0.0);
}

TEST_CASE("Hellmann-Feynman derivative against the closed-form operator") {
  const auto r = kappa_sweep(3, -20.0, 5.0, 11, 32);
  for (std::size_t i = 0; i < r.kappa_grid.size(); ++i) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa_operator(r.kappa_grid[i], 32));
    const Eigen::MatrixXd dA = 2.0 * (Eigen::MatrixXd::Identity(32, 32) - cos2_matrix(32));
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd v = es.eigenvectors().col(k);
      CHECK(std::abs(r.lambda(static_cast<int>(i), k) - es.eigenvalues()(k)) < 1e-9);
      CHECK(std::abs(r.dlambda_hf(static_cast<int>(i), k) - v.dot(dA * v)) < 1e-9);
    }
  }
}

TEST_CASE("direction angle") {
  const auto a = ModalState::basis(4, 1);
  CHECK(direction_angle(a, cplx(0, 1) * a) == doctest::Approx(pi / 2));
  CHECK(direction_angle(a, cplx(-2.0) * a) < 1e-12);
  CHECK(direction_angle(a, ModalState::basis(4, 2)) == doctest::Approx(pi / 2));
}

}  // TEST_SUITE
