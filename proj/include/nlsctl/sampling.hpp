#pragma once

#include "nlsctl/dynamics.hpp"

#include <random>

namespace nlsctl {

/// Independent standard normal real and imaginary parts in modes 1..kmax.
ModalState random_modal(int N, int kmax, std::mt19937_64& rng);

/// Random state tangent at phi: eigen-coefficients on k = 1..kmax, the
/// Re <., phi> component removed, scaled to the given H^3 norm.
ModalState random_tangent(const ProblemParams& params, int kmax, double h3_norm, std::mt19937_64& rng);

/// Random unit state whose H^3 distance from phi is at most `radius`.
ModalState random_unit_near_phi(const ProblemParams& params, double radius, std::mt19937_64& rng);

/// Control with independent normal bin values times `scale`.
ControlSignal random_control(double T, int bins, int channels, double scale, std::mt19937_64& rng);

}  // namespace nlsctl
