#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "phase_manifold/numerics/quadrature.hpp"
#include "phase_manifold/rdt/param_point.hpp"

namespace phase_manifold::rdt {

// Arguments of the lifted objective plus the derived quantities
// r_y_bar = r_y^2/(4 gamma), gamma_x = r_y_bar/(1 + r_y_bar), c3e = c3 r_y r.
struct LiftParams {
  double c3 = 0.0;
  double r_y = 0.0;
  double gamma = 0.0;
  double r_y_bar = 0.0;
  double gamma_x = 0.0;
  double c3e = 0.0;

  static LiftParams make(double c3, double r_y, double gamma, double r);
};

struct LiftedBoundResult {
  double phi0_bar = 0.0;
  LiftParams best;
  double gamma_sph_hat = 0.5;
};

// Closed-form maximizer of the spherical term, (c3e + sqrt(c3e^2 + 4)) / 4,
// normalized by r r_y.
double gamma_sph_hat(double c3e);

// E exp(-c3 gamma_x (|g0| - |g0 x + g1 r|)^2) via the erfc closed form of the
// inner g1 expectation, integrated over g0 on the full line.
double f_q_lift(const ParamPoint& pt, double c3, double gamma_x,
                const numerics::QuadratureSpec& quad);

// log f_q_lift as a function of t = c3 * gamma_x only, tabulated once per
// point on a uniform grid in log t (cubic B-spline of log(-log f)). Outside the
// table range it falls back to first-order expansion (small t) or exact
// quadrature (large t).
class LiftProfile {
 public:
  LiftProfile(const ParamPoint& pt, const numerics::QuadratureSpec& quad);
  ~LiftProfile();
  LiftProfile(LiftProfile&&) noexcept;
  LiftProfile& operator=(LiftProfile&&) noexcept;

  double log_f(double t) const;
  // True when r = 0 or E Q vanishes numerically; log_f is then identically 0.
  bool degenerate() const;
  double exact_log_f(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Search ranges and budgets for the nested max over (c3, r_y) / min over gamma.
struct LiftedOptions {
  double c3_lo = 1e-3;
  double c3_hi = 1e3;
  double r_y_lo = 1e-3;
  double r_y_hi = 1e3;
  double gamma_lo = 1e-4;
  double gamma_hi = 1e4;
  int outer_grid = 32;
  int inner_grid = 64;
  int simplex_max_evals = 400;
  // Non-squared bound only: bypass the tabulated profile and call f_q_lift
  // directly (slow; used to validate the table).
  bool exact_profile = false;
};

// log Phi(c3, r_y_bar): the log of the lifted per-measurement expectation.
using LogLiftFn = std::function<double(double c3, double r_y_bar)>;

// Value of the lifted objective at fixed (c3, r_y, gamma):
//   c3/2 r^2 r_y^2 + gamma - alpha/c3 log Phi(c3, r_y^2/(4 gamma))
//   - r r_y gamma_sph_hat + 1/(2 c3) log(1 - c3e/(2 gamma_sph_hat)).
double lifted_objective(double alpha, double r, double c3, double r_y, double gamma,
                        const LogLiftFn& log_phi);

// min over gamma of lifted_objective; returns (argmin gamma, value).
struct InnerMin {
  double gamma;
  double value;
};
InnerMin lifted_inner_min(double alpha, double r, double c3, double r_y,
                          const LogLiftFn& log_phi, double opt_tol,
                          const LiftedOptions& options);

// max over (c3, r_y) of the inner minimum: coarse log-grid followed by a
// Nelder-Mead refinement in (log c3, log r_y).
LiftedBoundResult optimize_lifted_grid(double alpha, double r, const LogLiftFn& log_phi,
                                       double opt_tol, const LiftedOptions& options);

// Partially lifted bound for the non-squared objective. r = 0 returns the
// plain bound value, as does a point whose E Q vanishes numerically.
LiftedBoundResult phi0_lifted(double alpha, const ParamPoint& pt,
                              const numerics::QuadratureSpec& quad, double opt_tol,
                              const LiftedOptions& options = {});

// Same, reusing a precomputed profile for the point (profiles depend on the
// point only, not on alpha).
LiftedBoundResult phi0_lifted(double alpha, const ParamPoint& pt, const LiftProfile& profile,
                              double opt_tol, const LiftedOptions& options = {});

}  // namespace phase_manifold::rdt
