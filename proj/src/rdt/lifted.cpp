#include "phase_manifold/rdt/lifted.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/optimize.hpp"
#include "phase_manifold/numerics/special.hpp"
#include "phase_manifold/rdt/plain.hpp"

namespace phase_manifold::rdt {

namespace {

// 1 - E_{g1} exp(-k (|g| - |g x + g1 r|)^2) for fixed g, from the erfc closed
// form of the two half-line Gaussian integrals (split at g x + g1 r = 0).
double lift_complement(double g, double k, double c, double x, double r) {
  const double abs_g = std::abs(g);
  const double cc = 1.0 + 2.0 * k * r * r;
  const double b = -g * x / r;
  const double sqrt_2c = std::sqrt(2.0 * cc);
  const double norm = 0.5 / std::sqrt(cc);
  const double quad_term = g * g * (1.0 + c - r * r);

  const double a1 = -2.0 * k * r * abs_g + 2.0 * k * g * r * x;
  const double d1 = -k * (quad_term - 2.0 * g * abs_g * x);
  const double i1 = norm * numerics::exp_times_erfc(d1 + a1 * a1 / (2.0 * cc), (a1 + cc * b) / sqrt_2c);

  const double a2 = 2.0 * k * r * abs_g + 2.0 * k * g * r * x;
  const double d2 = -k * (quad_term + 2.0 * g * abs_g * x);
  const double i2 =
      norm * numerics::exp_times_erfc(d2 + a2 * a2 / (2.0 * cc), -(a2 + cc * b) / sqrt_2c);
  return 1.0 - (i1 + i2);
}

// Integral of lift_complement against the Gaussian weight, i.e. 1 - f_q_lift.
double lift_deficit(const ParamPoint& pt, double k, const numerics::QuadratureSpec& quad) {
  const double c = pt.c();
  const double x = pt.x();
  const double r = pt.r();
  auto integrand = [=](double g) { return lift_complement(g, k, c, x, r); };
  return numerics::gauss_weighted_integral(integrand, numerics::Domain::full_line, quad);
}

constexpr double kProfileTMin = 1e-6;
constexpr double kProfileTMax = 1e4;
constexpr double kProfileStep = 0.04;  // in log t

}  // namespace

LiftParams LiftParams::make(double c3, double r_y, double gamma, double r) {
  LiftParams p;
  p.c3 = c3;
  p.r_y = r_y;
  p.gamma = gamma;
  p.r_y_bar = r_y * r_y / (4.0 * gamma);
  p.gamma_x = p.r_y_bar / (1.0 + p.r_y_bar);
  p.c3e = c3 * r_y * r;
  return p;
}

double gamma_sph_hat(double c3e) { return (c3e + std::sqrt(c3e * c3e + 4.0)) / 4.0; }

double f_q_lift(const ParamPoint& pt, double c3, double gamma_x,
                const numerics::QuadratureSpec& quad) {
  if (!(c3 > 0.0)) throw InvalidArgument("f_q_lift: c3 must be > 0");
  if (!(gamma_x > 0.0 && gamma_x < 1.0)) throw InvalidArgument("f_q_lift: gamma_x must be in (0,1)");
  if (pt.r() == 0.0) return 1.0;
  const double deficit = lift_deficit(pt, c3 * gamma_x, quad);
  return std::clamp(1.0 - deficit, 0.0, 1.0);
}

struct LiftProfile::Impl {
  ParamPoint pt;
  numerics::QuadratureSpec quad;
  double mean_q = 0.0;  // E Q = plain f_q
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;

  // psi(t) = -log f_q_lift at c3 * gamma_x = t.
  double exact_psi(double t) const {
    numerics::QuadratureSpec q = quad;
    q.abs_tol = std::min(quad.abs_tol, 1e-9 * t * mean_q);
    q.abs_tol = std::max(q.abs_tol, 1e-300);
    const double linear = t * mean_q;
    // Below this the deficit is dominated by cancellation noise; the cumulant
    // expansion psi = t E Q + O(t^2) is exact to working precision there.
    if (linear < 1e-9) return linear;
    double deficit = 0.0;
    try {
      deficit = lift_deficit(pt, t, q);
    } catch (const NonConvergence&) {
      q.abs_tol = std::max(q.abs_tol, 1e-15);  // roundoff floor of 1 - (i1 + i2)
      q.max_subdivisions *= 8;
      deficit = lift_deficit(pt, t, q);
    }
    const double psi = -std::log1p(-std::min(deficit, 1.0 - 1e-300));
    return (psi > 0.0 && std::isfinite(psi)) ? psi : linear;
  }

  bool degenerate() const { return pt.r() == 0.0 || !(mean_q > 0.0); }
};

LiftProfile::LiftProfile(const ParamPoint& pt, const numerics::QuadratureSpec& quad)
    : impl_(std::make_unique<Impl>(Impl{pt, quad, 0.0, {}})) {
  if (pt.r() == 0.0) return;
  impl_->mean_q = f_q_closed(pt, quad);
  if (impl_->degenerate()) return;
  const double u0 = std::log(kProfileTMin);
  const int n = static_cast<int>(std::ceil((std::log(kProfileTMax) - u0) / kProfileStep)) + 1;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = std::log(impl_->exact_psi(std::exp(u0 + kProfileStep * i)));
  }
  impl_->spline = boost::math::interpolators::cardinal_cubic_b_spline<double>(
      w.begin(), w.end(), u0, kProfileStep);
}

LiftProfile::~LiftProfile() = default;
LiftProfile::LiftProfile(LiftProfile&&) noexcept = default;
LiftProfile& LiftProfile::operator=(LiftProfile&&) noexcept = default;

bool LiftProfile::degenerate() const { return impl_->degenerate(); }

double LiftProfile::log_f(double t) const {
  if (impl_->degenerate()) return 0.0;
  if (t < kProfileTMin) return -impl_->mean_q * t;
  if (t > kProfileTMax) return exact_log_f(t);
  return -std::exp(impl_->spline(std::log(t)));
}

double LiftProfile::exact_log_f(double t) const {
  if (impl_->degenerate()) return 0.0;
  return -impl_->exact_psi(t);
}

double lifted_objective(double alpha, double r, double c3, double r_y, double gamma,
                        const LogLiftFn& log_phi) {
  const double c3e = c3 * r_y * r;
  const double g_sph = gamma_sph_hat(c3e);
  const double r_y_bar = r_y * r_y / (4.0 * gamma);
  // log(1 - c3e/(2 g)) == -2 log(2 g) for g = gamma_sph_hat(c3e).
  const double sphere_log = -2.0 * std::log(2.0 * g_sph);
  return 0.5 * c3 * r * r * r_y * r_y + gamma - alpha / c3 * log_phi(c3, r_y_bar) -
         r * r_y * g_sph + sphere_log / (2.0 * c3);
}

InnerMin lifted_inner_min(double alpha, double r, double c3, double r_y,
                          const LogLiftFn& log_phi, double opt_tol,
                          const LiftedOptions& options) {
  auto profile = [&](double gamma) {
    return lifted_objective(alpha, r, c3, r_y, gamma, log_phi);
  };
  numerics::ScalarSearchOptions search;
  search.grid_points = options.inner_grid;
  search.spacing = numerics::GridSpacing::logarithmic;
  const auto best =
      numerics::minimize_scalar(profile, options.gamma_lo, options.gamma_hi, opt_tol, search);
  return {best.arg, best.value};
}

LiftedBoundResult optimize_lifted_grid(double alpha, double r, const LogLiftFn& log_phi,
                                       double opt_tol, const LiftedOptions& options) {
  const int n = std::max(options.outer_grid, 2);
  const double lc_lo = std::log(options.c3_lo);
  const double lc_hi = std::log(options.c3_hi);
  const double lr_lo = std::log(options.r_y_lo);
  const double lr_hi = std::log(options.r_y_hi);

  auto outer = [&](double log_c3, double log_r_y) {
    return lifted_inner_min(alpha, r, std::exp(log_c3), std::exp(log_r_y), log_phi, opt_tol,
                            options)
        .value;
  };

  double best_value = -std::numeric_limits<double>::infinity();
  double best_lc = lc_lo;
  double best_lr = lr_lo;
  for (int i = 0; i < n; ++i) {
    const double lc = lc_lo + (lc_hi - lc_lo) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double lr = lr_lo + (lr_hi - lr_lo) * j / (n - 1);
      const double v = outer(lc, lr);
      if (v > best_value) {
        best_value = v;
        best_lc = lc;
        best_lr = lr;
      }
    }
  }

  const double cell = (lc_hi - lc_lo) / (n - 1);
  auto negated = [&](const std::vector<double>& p) {
    if (p[0] < lc_lo || p[0] > lc_hi || p[1] < lr_lo || p[1] > lr_hi) {
      return std::numeric_limits<double>::infinity();
    }
    return -outer(p[0], p[1]);
  };
  const auto refined = numerics::nelder_mead_minimize(negated, {best_lc, best_lr}, 0.5 * cell,
                                                      opt_tol, 1e-14, options.simplex_max_evals);
  if (-refined.value > best_value) {
    best_value = -refined.value;
    best_lc = refined.arg[0];
    best_lr = refined.arg[1];
  }
  if (!std::isfinite(best_value)) throw NonConvergence("lifted bound: no finite objective value");

  const double c3 = std::exp(best_lc);
  const double r_y = std::exp(best_lr);
  const auto inner = lifted_inner_min(alpha, r, c3, r_y, log_phi, opt_tol, options);
  LiftedBoundResult result;
  result.phi0_bar = best_value;
  result.best = LiftParams::make(c3, r_y, inner.gamma, r);
  result.gamma_sph_hat = gamma_sph_hat(result.best.c3e);
  return result;
}

LiftedBoundResult phi0_lifted(double alpha, const ParamPoint& pt, const LiftProfile& profile,
                              double opt_tol, const LiftedOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("phi0_lifted: alpha must be > 0");
  if (profile.degenerate()) {
    LiftedBoundResult result;
    result.phi0_bar = phi0_plain(alpha, pt, {}).phi0;
    return result;
  }
  LogLiftFn log_phi = [&profile, &options](double c3, double r_y_bar) {
    const double t = c3 * r_y_bar / (1.0 + r_y_bar);
    return options.exact_profile ? profile.exact_log_f(t) : profile.log_f(t);
  };
  return optimize_lifted_grid(alpha, pt.r(), log_phi, opt_tol, options);
}

LiftedBoundResult phi0_lifted(double alpha, const ParamPoint& pt,
                              const numerics::QuadratureSpec& quad, double opt_tol,
                              const LiftedOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("phi0_lifted: alpha must be > 0");
  if (pt.r() == 0.0) return phi0_lifted(alpha, pt, LiftProfile(pt, quad), opt_tol, options);
  if (options.exact_profile) {
    // Skip tabulation entirely.
    LogLiftFn log_phi = [&pt, &quad](double c3, double r_y_bar) {
      const double gamma_x = r_y_bar / (1.0 + r_y_bar);
      return std::log(f_q_lift(pt, c3, gamma_x, quad));
    };
    return optimize_lifted_grid(alpha, pt.r(), log_phi, opt_tol, options);
  }
  return phi0_lifted(alpha, pt, LiftProfile(pt, quad), opt_tol, options);
}

}  // namespace phase_manifold::rdt
