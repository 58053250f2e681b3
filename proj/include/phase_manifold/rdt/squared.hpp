#pragma once

#include "phase_manifold/numerics/quadrature.hpp"
#include "phase_manifold/rdt/lifted.hpp"
#include "phase_manifold/rdt/param_point.hpp"

namespace phase_manifold::rdt {

struct InnerMinSq {
  double z_opt;
  double value;
};

// min over z >= 0 of (g0^2 - z^2)^2 + r_y (|v| - z)^2. The stationary points
// solve z^3 + p z + q = 0 with p = (r_y - 2 g0^2)/2, q = -r_y |v|/2; the
// minimum is taken over those roots and the boundary z = 0.
InnerMinSq inner_min_sq(double g0, double v, double r_y);

// E inner_min_sq(g0, g0 x + g1 r, r_y) over iid standard normal g0, g1.
double f_q_sq(const ParamPoint& pt, double r_y, const numerics::QuadratureSpec& quad);

struct PlainSqResult {
  double phi0;
  double r_y_hat;
  double f_q;  // f_q_sq at r_y_hat
};

// max over r_y in [1e-3, 1e3] of alpha f_q_sq(r_y) - r^2 r_y.
PlainSqResult phi0_sq_detail(double alpha, const ParamPoint& pt,
                             const numerics::QuadratureSpec& quad, double opt_tol);
double phi0_sq(double alpha, const ParamPoint& pt, const numerics::QuadratureSpec& quad,
               double opt_tol);

// E exp(-c3 inner_min_sq(g0, v, r_y_bar)).
double f_q_sq_lift(const ParamPoint& pt, double c3, double r_y_bar,
                   const numerics::QuadratureSpec& quad);

// Lifted squared bound: same outer objective as phi0_lifted with
// log Phi(c3, r_y_bar) = log f_q_sq_lift(c3, r_y_bar).
//
// Search: golden/grid over log c3, and for each c3 a tabulated profile of
// -log f_q_sq_lift in log r_y_bar; then a scalar max over r_y of the min over
// r_y_bar (equivalently gamma = r_y^2/(4 r_y_bar)). r = 0 returns phi0_sq.
LiftedBoundResult phi0_sq_lifted(double alpha, const ParamPoint& pt,
                                 const numerics::QuadratureSpec& quad, double opt_tol,
                                 const LiftedOptions& options = {});

}  // namespace phase_manifold::rdt
