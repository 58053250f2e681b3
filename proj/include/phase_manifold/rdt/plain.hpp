#pragma once

#include "phase_manifold/numerics/quadrature.hpp"
#include "phase_manifold/rdt/param_point.hpp"

namespace phase_manifold::rdt {

struct PlainBoundResult {
  double f_q;      // E(|g0| - |g0 x + g1 r|)^2
  double r_y_hat;  // optimal dual radius; +inf when r = 0 and f_q > 0
  double phi0;     // max(sqrt(alpha f_q) - r, 0)^2
};

// E(|g0| - |g0 x + g1 r|)^2 for iid standard normals g0, g1.
//
// The inner expectation over g1 is done in closed form: with g = |g0|,
//   A = g^2 x,  B = g r,  C = -g x / r,
//   I1 = A/2 erfc(C/sqrt2) + B phi(C),  I2 = -A (1 - erfc(C/sqrt2)/2) + B phi(C),
// E_{g1} |g0| |g0 x + g1 r| = I1 + I2 and the integrand is (1 + c) - 2 (I1 + I2),
// integrated over g >= 0 against the doubled Gaussian weight. At r = 0 the
// value is (1 - x)^2 directly.
double f_q_closed(const ParamPoint& pt, const numerics::QuadratureSpec& quad);

// Plain random-dual lower bound on the scaled objective at (alpha, c, x).
PlainBoundResult phi0_plain(double alpha, const ParamPoint& pt,
                            const numerics::QuadratureSpec& quad);

}  // namespace phase_manifold::rdt
