#include "phase_manifold/rdt/squared.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/cubic.hpp"
#include "phase_manifold/numerics/optimize.hpp"

namespace phase_manifold::rdt {

namespace {

// E h(|g0|, g0 x + g1 r) for a function h that is even under (g0, g1) -> -(g0, g1).
// Only g0 >= 0 is integrated (doubled). The inner g1 range is split where v
// crosses 0 (kink of |v|) and +-g0 (zero set of the inner minimum, where
// exp(-c3 m) peaks sharply for large c3).
template <class H>
double gaussian_expectation_2d(const ParamPoint& pt, H&& h, const numerics::QuadratureSpec& quad) {
  const double x = pt.x();
  const double r = pt.r();
  const double radius = quad.truncation_radius;
  if (r == 0.0) {
    auto along = [&](double g0) { return h(g0, g0 * x); };
    return 2.0 * numerics::gauss_weighted_integral(along, numerics::Domain::half_line, quad);
  }
  auto inner = [&](double g0) {
    auto weighted = [&](double g1) {
      return h(g0, g0 * x + g1 * r) * numerics::standard_normal_pdf(g1);
    };
    std::array<double, 5> cuts = {-radius, -g0 * (1.0 + x) / r, -g0 * x / r, g0 * (1.0 - x) / r,
                                  radius};
    std::sort(cuts.begin() + 1, cuts.end() - 1);
    double total = 0.0;
    double lo = -radius;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      const double hi = std::clamp(cuts[k], -radius, radius);
      if (hi > lo) {
        total += numerics::integrate_adaptive(weighted, lo, hi, quad, 1);
        lo = hi;
      }
    }
    return total;
  };
  auto outer = [&](double g0) { return inner(g0) * numerics::standard_normal_pdf(g0); };
  return 2.0 * numerics::integrate_adaptive(outer, 0.0, radius, quad, 2);
}

InnerMinSq inner_min_unchecked(double g0, double v, double r_y) {
  double roots[4];
  const double g2 = g0 * g0;
  const double abs_v = std::abs(v);
  const int n = numerics::cubic_real_nonneg_roots(0.5 * (r_y - 2.0 * g2), -0.5 * r_y * abs_v, roots);
  InnerMinSq best{0.0, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < n; ++k) {
    const double z = roots[k];
    const double a = g2 - z * z;
    const double b = abs_v - z;
    const double value = a * a + r_y * b * b;
    if (value < best.value) best = {z, value};
  }
  return best;
}

double inner_value(double g0, double v, double r_y) { return inner_min_unchecked(g0, v, r_y).value; }

constexpr double kBarMin = 1e-6;
constexpr double kBarMax = 1e6;
constexpr double kBarStep = 0.4;  // in log r_y_bar

// The deficit 1 - f_q_sq_lift spans many decades over the table, so the
// profile integrals run on a relative target only.
numerics::QuadratureSpec profile_quad(const numerics::QuadratureSpec& quad) {
  numerics::QuadratureSpec q = quad;
  q.abs_tol = 1e-300;
  q.rel_tol = std::max(quad.rel_tol, 1e-7);
  q.max_subdivisions = std::max(quad.max_subdivisions, 2000);
  return q;
}

// psi(r_y_bar) = -log f_q_sq_lift(c3, r_y_bar) for one c3, tabulated as a cubic
// B-spline of log psi in log r_y_bar. Below the table psi is linear in
// r_y_bar (the inner minimum is r_y_bar (|v| - |g0|)^2 to first order); above
// it the inner minimum saturates at (g0^2 - v^2)^2 and psi is held constant.
class SqLiftProfile {
 public:
  SqLiftProfile(const ParamPoint& pt, double c3, const numerics::QuadratureSpec& quad) {
    const numerics::QuadratureSpec q = profile_quad(quad);
    const double u0 = std::log(kBarMin);
    const int n = static_cast<int>(std::ceil((std::log(kBarMax) - u0) / kBarStep)) + 1;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      w[i] = std::log(exact_psi(pt, c3, std::exp(u0 + kBarStep * i), q));
    }
    psi_lo_ = std::exp(w.front());
    psi_hi_ = std::exp(w.back());
    spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(w.begin(), w.end(), u0,
                                                                          kBarStep);
  }

  static double exact_psi(const ParamPoint& pt, double c3, double r_y_bar,
                          const numerics::QuadratureSpec& quad) {
    auto deficit = [&](double g0, double v) { return -std::expm1(-c3 * inner_value(g0, v, r_y_bar)); };
    const double d = gaussian_expectation_2d(pt, deficit, quad);
    const double psi = -std::log1p(-std::min(d, 1.0 - 1e-300));
    if (!(psi > 0.0) || !std::isfinite(psi)) {
      throw NonConvergence("squared lifted profile: non-positive -log f_q at r_y_bar=" +
                           std::to_string(r_y_bar));
    }
    return psi;
  }

  double psi(double r_y_bar) const {
    if (r_y_bar < kBarMin) return psi_lo_ * (r_y_bar / kBarMin);
    if (r_y_bar > kBarMax) return psi_hi_;
    return std::exp(spline_(std::log(r_y_bar)));
  }

 private:
  double psi_lo_ = 0.0;
  double psi_hi_ = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

}  // namespace

InnerMinSq inner_min_sq(double g0, double v, double r_y) {
  if (!(r_y > 0.0)) throw InvalidArgument("inner_min_sq: r_y must be > 0");
  return inner_min_unchecked(g0, v, r_y);
}

double f_q_sq(const ParamPoint& pt, double r_y, const numerics::QuadratureSpec& quad) {
  if (!(r_y > 0.0)) throw InvalidArgument("f_q_sq: r_y must be > 0");
  if (pt.r() == 0.0 && pt.x() == 1.0) return 0.0;
  auto h = [r_y](double g0, double v) { return inner_value(g0, v, r_y); };
  return std::max(gaussian_expectation_2d(pt, h, quad), 0.0);
}

PlainSqResult phi0_sq_detail(double alpha, const ParamPoint& pt,
                             const numerics::QuadratureSpec& quad, double opt_tol) {
  if (!(alpha > 0.0)) throw InvalidArgument("phi0_sq: alpha must be > 0");
  if (pt.r() == 0.0 && pt.x() == 1.0) return {0.0, 0.0, 0.0};
  const double r2 = pt.r() * pt.r();
  auto objective = [&](double log_r_y) {
    const double r_y = std::exp(log_r_y);
    return alpha * f_q_sq(pt, r_y, quad) - r2 * r_y;
  };
  numerics::ScalarSearchOptions search;
  search.grid_points = 32;
  search.spacing = numerics::GridSpacing::linear;
  const auto best = numerics::maximize_scalar(objective, std::log(1e-3), std::log(1e3),
                                              std::max(opt_tol, 1e-10), search);
  const double r_y = std::exp(best.arg);
  return {std::max(best.value, 0.0), r_y, f_q_sq(pt, r_y, quad)};
}

double phi0_sq(double alpha, const ParamPoint& pt, const numerics::QuadratureSpec& quad,
               double opt_tol) {
  return phi0_sq_detail(alpha, pt, quad, opt_tol).phi0;
}

double f_q_sq_lift(const ParamPoint& pt, double c3, double r_y_bar,
                   const numerics::QuadratureSpec& quad) {
  if (!(c3 > 0.0)) throw InvalidArgument("f_q_sq_lift: c3 must be > 0");
  if (!(r_y_bar > 0.0)) throw InvalidArgument("f_q_sq_lift: r_y_bar must be > 0");
  auto h = [=](double g0, double v) { return -std::expm1(-c3 * inner_value(g0, v, r_y_bar)); };
  return std::clamp(1.0 - gaussian_expectation_2d(pt, h, quad), 0.0, 1.0);
}

LiftedBoundResult phi0_sq_lifted(double alpha, const ParamPoint& pt,
                                 const numerics::QuadratureSpec& quad, double opt_tol,
                                 const LiftedOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("phi0_sq_lifted: alpha must be > 0");
  if (pt.r() == 0.0) {
    LiftedBoundResult result;
    result.phi0_bar = phi0_sq(alpha, pt, quad, opt_tol);
    return result;
  }
  const double r = pt.r();
  std::map<double, SqLiftProfile> profiles;
  auto profile_for = [&](double c3) -> const SqLiftProfile& {
    auto it = profiles.find(c3);
    if (it == profiles.end()) it = profiles.emplace(c3, SqLiftProfile(pt, c3, quad)).first;
    return it->second;
  };

  // Value of max_{r_y} min_{gamma} at fixed c3.
  auto at_c3 = [&](double c3, double* best_r_y) {
    const SqLiftProfile& prof = profile_for(c3);
    LogLiftFn log_phi = [&prof](double, double r_y_bar) { return -prof.psi(r_y_bar); };
    auto over_r_y = [&](double log_r_y) {
      return lifted_inner_min(alpha, r, c3, std::exp(log_r_y), log_phi, opt_tol, options).value;
    };
    numerics::ScalarSearchOptions search;
    search.grid_points = options.outer_grid;
    search.spacing = numerics::GridSpacing::linear;
    const auto best = numerics::maximize_scalar(over_r_y, std::log(options.r_y_lo),
                                                std::log(options.r_y_hi), 1e-4, search);
    if (best_r_y) *best_r_y = std::exp(best.arg);
    return best.value;
  };

  numerics::ScalarSearchOptions c3_search;
  c3_search.grid_points = 12;
  c3_search.spacing = numerics::GridSpacing::linear;
  const auto best = numerics::maximize_scalar(
      [&](double log_c3) { return at_c3(std::exp(log_c3), nullptr); }, std::log(options.c3_lo),
      std::log(options.c3_hi), 1e-2, c3_search);
  if (!std::isfinite(best.value)) {
    throw NonConvergence("squared lifted bound: no finite objective value");
  }

  const double c3 = std::exp(best.arg);
  double r_y = 0.0;
  const double value = at_c3(c3, &r_y);
  const SqLiftProfile& prof = profile_for(c3);
  LogLiftFn log_phi = [&prof](double, double r_y_bar) { return -prof.psi(r_y_bar); };
  const auto inner = lifted_inner_min(alpha, r, c3, r_y, log_phi, opt_tol, options);
  LiftedBoundResult result;
  result.phi0_bar = value;
  result.best = LiftParams::make(c3, r_y, inner.gamma, r);
  result.gamma_sph_hat = gamma_sph_hat(result.best.c3e);
  return result;
}

}  // namespace phase_manifold::rdt
