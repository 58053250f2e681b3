#include "phase_manifold/rdt/plain.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "phase_manifold/errors.hpp"

namespace phase_manifold::rdt {

ParamPoint ParamPoint::make(double c, double x) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("ParamPoint: c must be > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("ParamPoint: x must be >= 0");
  const double gap = c - x * x;
  if (gap < -1e-12 * c) throw InvalidArgument("ParamPoint: infeasible, x^2 > c");
  // x = sqrt(c) rounded leaves a gap of a few ulps; treat it as the boundary.
  const bool boundary = gap <= 4.0 * std::numeric_limits<double>::epsilon() * c;
  return ParamPoint(c, x, boundary ? 0.0 : std::sqrt(gap));
}

double f_q_closed(const ParamPoint& pt, const numerics::QuadratureSpec& quad) {
  const double c = pt.c();
  const double x = pt.x();
  const double r = pt.r();
  if (r == 0.0) return (1.0 - x) * (1.0 - x);

  auto integrand = [c, x, r](double g) {
    const double a = g * g * x;
    const double b = g * r;
    const double cc = -g * x / r;
    const double bphi = b * numerics::standard_normal_pdf(cc);
    const double i1 = 0.5 * a * std::erfc(cc / std::numbers::sqrt2) + bphi;
    // 1 - erfc(z)/2 == erfc(-z)/2
    const double i2 = -a * 0.5 * std::erfc(-cc / std::numbers::sqrt2) + bphi;
    return (1.0 + c) - 2.0 * (i1 + i2);
  };
  // The integrand is O(1) while f_q can be O(r^3) near r -> 0, so the absolute
  // target is tightened; the smooth integrand converges in a few panels.
  numerics::QuadratureSpec tight = quad;
  tight.abs_tol = std::min(quad.abs_tol, 1e-14);
  const double value =
      2.0 * numerics::gauss_weighted_integral(integrand, numerics::Domain::half_line, tight);
  return std::max(value, 0.0);
}

PlainBoundResult phi0_plain(double alpha, const ParamPoint& pt,
                            const numerics::QuadratureSpec& quad) {
  if (!(alpha > 0.0)) throw InvalidArgument("phi0_plain: alpha must be > 0");
  const double f_q = f_q_closed(pt, quad);
  const double root = std::sqrt(alpha * f_q);
  const double r = pt.r();
  double r_y_hat;
  if (r > 0.0) {
    r_y_hat = std::max(root / r - 1.0, 0.0);
  } else {
    r_y_hat = f_q > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double gap = std::max(root - r, 0.0);
  return {f_q, r_y_hat, gap * gap};
}

}  // namespace phase_manifold::rdt
