#pragma once

#include "hyperc/state_space.hpp"

namespace hyperc {

/// True when no generalized eigenvalue of the bounded-real symplectic pencil
/// lies on the unit circle, i.e. gamma is not attained as a singular value of
/// G(e^{j theta}) at any frequency.  Requires gamma > sigma_max(D).
bool norm_level_clear(const DiscreteStateSpace& sys, double gamma);

/// L-infinity norm over the unit circle of a Schur-stable discrete system,
/// by bisection on the unit-circle-eigenvalue test of the symplectic pencil.
/// Returns +infinity when A is not Schur stable.
double hinf_norm(const DiscreteStateSpace& sys, double tol = 1e-6);

} // namespace hyperc
