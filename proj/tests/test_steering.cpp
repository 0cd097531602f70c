#include "doctest.h"
#include "support.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/sampling.hpp"
#include "nlsctl/steering.hpp"

using namespace nlsctl;
using namespace testsupport;

namespace {

ProblemParams setup_params(double kappa, int N, int steps = 2048) {
  ProblemSetup s;
  s.kappa = kappa;
  s.N = N;
  s.steps = steps;
  return make_params(s);
}

ModalState phi2_target(const ProblemParams& P) {
  ModalState t = P.phi + ModalState::basis(P.N(), 2, cplx(0, 1e-3 / (8 * pi * pi * pi)));
  t *= 1.0 / std::sqrt(sobolev_norm(t, 0.0) * sobolev_norm(t, 0.0));
  return t;
}

double l2(const ModalState& s) { return sobolev_norm(s, 0.0); }

}  // namespace

TEST_SUITE("steering") {

TEST_CASE("ground state to itself needs no iteration") {
  const auto P = setup_params(1.0, 12);
  const auto r = newton_steer(P.phi, P.phi, P);
  CHECK(r.verdict == Verdict::Converged);
  CHECK(r.iterations == 0);
  // Roundoff in the top modes sets an H^3 floor near 1e-10 at N = 12.
  CHECK(r.final_residual() < 1e-10 * sobolev_norm(P.phi, 3.0));
  CHECK(l2(propagate_nls(P.phi, r.final_control, P).terminal() - P.phi) < 1e-12);
  const ControlSignal st = stationary_control(P, r.final_control.intervals());
  CHECK((r.final_control.values - st.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("small phi_2 perturbation converges quadratically") {
  const auto P = setup_params(0.5, 12);
  const ModalState target = phi2_target(P);
  const auto r = newton_steer(P.phi, target, P);
  CHECK(r.verdict == Verdict::Converged);
  CHECK(r.final_residual() < 1e-8);
  CHECK(r.iterations <= 5);
  // Re-propagation with the returned control.
  const auto traj = propagate_nls(P.phi, r.final_control, P);
  CHECK(h3_distance(traj.terminal(), target) < 1e-8);
  CHECK(std::isfinite(r.contraction_constant));
  CHECK(r.contraction_constant >= 0.0);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    CHECK(r.residual_history[i] < r.residual_history[i - 1]);
}

TEST_CASE("random near-ground endpoints: sphere preserved along the iteration") {
  const auto P = setup_params(0.5, 12);
  for_all(2, 61, [&](Gen& g, int) {
    const ModalState a = random_unit_near_phi(P, 1e-3, g.rng());
    const ModalState b = random_unit_near_phi(P, 1e-3, g.rng());
    CHECK(std::abs(l2(a) - 1.0) < 1e-12);
    CHECK(h3_distance(a, P.phi) <= 1e-3 * (1 + 1e-12));
    const auto r = newton_steer(a, b, P);
    CHECK(r.verdict == Verdict::Converged);
    REQUIRE(r.residual_history.size() == r.norm_drift_history.size());
    for (double d : r.norm_drift_history) CHECK(d < 1e-10);
    for (double c : r.control_norm_history) CHECK(std::isfinite(c));
  });
}

TEST_CASE("far target is reported as not converged") {
  const auto P = setup_params(0.5, 12);
  const ModalState far = perturbed_ground_state(P, ModalState::basis(12, 3, cplx(0, 1)), 10.0);
  CHECK(h3_distance(far, P.phi) == doctest::Approx(10.0).epsilon(0.05));
  SteeringReport r;
  try {
    r = newton_steer(P.phi, far, P);
  } catch (const Error& e) {
    // A deficient linear solve is also an explicit failure.
    CHECK(e.code() == ErrorCode::ControlDeficient);
    return;
  }
  CHECK(r.verdict != Verdict::Converged);
  CHECK(r.final_residual() > 1e-8);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("endpoints off the sphere are rejected") {
  const auto P = setup_params(0.5, 12);
  ModalState bad = P.phi;
  bad *= 1.01;
  CHECK_THROWS_AS(newton_steer(bad, P.phi, P), Error);
  CHECK_THROWS_AS(newton_steer(P.phi, bad, P), Error);
}

TEST_CASE("bins must divide the step count") {
  const auto P = setup_params(0.5, 12);
  SteeringOptions o;
  o.bins = 48;
  try {
    newton_steer(P.phi, P.phi, P, o);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TimeGridMismatch);
  }
}

TEST_CASE("two-leg steering between ground states is stationary on [0, 2T]") {
  const auto P = setup_params(0.5, 12);
  const auto r = two_leg_steer(P.phi, P.phi, P);
  CHECK(r.converged);
  CHECK(r.control.horizon() == doctest::Approx(2.0));
  const Eigen::VectorXd st = stationary_control(P).values.row(0).transpose();
  for (int j = 0; j < r.control.intervals(); ++j)
    CHECK((r.control.values.row(j).transpose() - st).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.end_to_end_residual < 1e-10 * sobolev_norm(P.phi, 3.0));
}

TEST_CASE("two-leg steering end to end") {
  const auto P = setup_params(0.5, 12);
  std::mt19937_64 rng(71);
  const ModalState a = random_unit_near_phi(P, 1e-3, rng), b = random_unit_near_phi(P, 1e-3, rng);
  const auto r = two_leg_steer(a, b, P);
  CHECK(r.converged);
  CHECK(r.failed_leg.empty());
  CHECK(r.end_to_end_residual < 1e-7);
  // Independent propagation over the doubled horizon.
  const ProblemParams P2 = extended_horizon(P, 2);
  CHECK(P2.T() == doctest::Approx(2.0));
  CHECK(P2.dt() == doctest::Approx(P.dt()));
  CHECK(h3_distance(propagate_nls(a, r.control, P2).terminal(), b) < 1e-7);
}

TEST_CASE("gradient check: v = 0 has zero remainder") {
  const auto P = setup_params(1.0, 12);
  const ControlSignal u = stationary_control(P, 64);
  const auto g = gradient_check(P.phi, u, ControlSignal::zero(1.0, 4, 64), P, {1e-2, 1e-3});
  for (double r : g.remainders) CHECK(r == 0.0);
  CHECK(g.exact);
}

TEST_CASE("gradient check: second-order remainder for kappa = 1") {
  const auto P = setup_params(1.0, 12);
  std::mt19937_64 rng(83);
  const ControlSignal u = stationary_control(P, 64);
  const ControlSignal v = random_control(1.0, 64, 4, 1.0, rng);
  const auto g = gradient_check(P.phi, u, v, P, {1e-2, 1e-3, 1e-4, 1e-5});
  CHECK_FALSE(g.exact);
  CHECK(g.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("gradient check: kappa = 0") {
  const auto P = setup_params(0.0, 12);
  std::mt19937_64 rng(89);
  const ControlSignal u = stationary_control(P, 64);
  const ControlSignal v = random_control(1.0, 64, 4, 1.0, rng);
  const auto g = gradient_check(P.phi, u, v, P, {1e-2, 1e-3, 1e-4, 1e-5});
  CHECK((g.exact || g.slope >= 2.0 - 0.1));
}

TEST_CASE("perturbed ground state is a unit state at the requested distance") {
  const auto P = setup_params(0.5, 12);
  for_all(10, 101, [&](Gen& g, int) {
    const double radius = g.uniform(1e-4, 1e-2);
    const ModalState s = perturbed_ground_state(P, g.state(12, 6), radius);
    CHECK(std::abs(l2(s) - 1.0) < 1e-12);
    CHECK(h3_distance(s, P.phi) == doctest::Approx(radius).epsilon(0.05));
  });
}

TEST_CASE("re-propagation at twice the time resolution within 10x tolerance" * doctest::should_fail()) {
  const auto P = setup_params(0.5, 16);
  std::mt19937_64 rng(97);
  const ModalState a = random_unit_near_phi(P, 1e-3, rng), b = random_unit_near_phi(P, 1e-3, rng);
  const auto r = newton_steer(a, b, P);
  REQUIRE(r.verdict == Verdict::Converged);
  CHECK(reverify(r.final_control, a, b, P, 2) < 10 * 1e-8);
}

}  // TEST_SUITE
