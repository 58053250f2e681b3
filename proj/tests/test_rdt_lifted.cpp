#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phase_manifold/errors.hpp"
#include "phase_manifold/rdt/lifted.hpp"
#include "phase_manifold/rdt/plain.hpp"

using namespace phase_manifold;
using namespace phase_manifold::rdt;

namespace {

const numerics::QuadratureSpec kQuad;
constexpr double kOptTol = 1e-7;

LogLiftFn profile_fn(const LiftProfile& profile) {
  return [&profile](double c3, double r_y_bar) {
    return profile.log_f(c3 * r_y_bar / (1.0 + r_y_bar));
  };
}

}  // namespace

TEST_CASE("spherical optimum closed form") {
  CHECK(gamma_sph_hat(0.0) == 0.5);
  CHECK(gamma_sph_hat(2.0) == doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0).epsilon(1e-15));
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double c3e = u(eng);
    const double g = gamma_sph_hat(c3e);
    CHECK(2.0 * g > c3e);
    const double arg = 1.0 - c3e / (2.0 * g);
    CHECK(arg > 0.0);
    CHECK(arg <= 1.0);
  }
}

TEST_CASE("lift params derived fields") {
  const auto p = LiftParams::make(2.0, 0.6, 0.3, 0.5);
  CHECK(p.r_y_bar == doctest::Approx(0.36 / 1.2).epsilon(1e-15));
  CHECK(p.gamma_x == doctest::Approx(0.3 / 1.3).epsilon(1e-15));
  CHECK(p.c3e == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("f_q_lift limits") {
  const auto pt = ParamPoint::make(1.0, 0.5);
  CHECK(f_q_lift(pt, 1e-9, 0.5, kQuad) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f_q_lift(ParamPoint::make(1.0, 1.0), 5.0, 0.5, kQuad) == 1.0);
  CHECK_THROWS_AS(f_q_lift(pt, 0.0, 0.5, kQuad), InvalidArgument);
  CHECK_THROWS_AS(f_q_lift(pt, 1.0, 1.0, kQuad), InvalidArgument);
}

TEST_CASE("f_q_lift agrees with Monte Carlo") {
  const double c = 1.0;
  const double x = 0.5;
  const double r = std::sqrt(c - x * x);
  const double t = 2.0 * 0.5;
  const auto mc = oracles::monte_carlo_2d(
      [&](double g0, double g1) {
        const double d = std::abs(g0) - std::abs(g0 * x + g1 * r);
        return std::exp(-t * d * d);
      },
      2000000, 41);
  const double got = f_q_lift(ParamPoint::make(c, x), 2.0, 0.5, kQuad);
  CHECK(std::abs(got - mc.mean) <= 4.0 * mc.stderr_);
  CHECK(got > 0.0);
  CHECK(got <= 1.0);
}

TEST_CASE("f_q_lift is strictly decreasing in c3 gamma_x") {
  std::mt19937_64 eng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double c = 0.1 + 1.4 * u(eng);
    const double x = std::sqrt(c) * 0.95 * u(eng);
    const auto pt = ParamPoint::make(c, x);
    double prev = 1.0;
    for (double c3 : {0.05, 0.3, 1.0, 4.0, 20.0}) {
      const double v = f_q_lift(pt, c3, 0.5, kQuad);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("tabulated profile matches direct quadrature") {
  for (double x : {0.0, 0.3, 0.8}) {
    const auto pt = ParamPoint::make(1.0, x);
    const LiftProfile profile(pt, kQuad);
    REQUIRE_FALSE(profile.degenerate());
    for (double t : {3e-6, 1e-3, 0.07, 1.0, 13.0, 700.0}) {
      // c3 = 2 t with gamma_x = 1/2 puts the product at t.
      const double direct = std::log(f_q_lift(pt, 2.0 * t, 0.5, kQuad));
      CHECK(profile.log_f(t) == doctest::Approx(direct).epsilon(1e-6));
      CHECK(profile.exact_log_f(t) == doctest::Approx(direct).epsilon(1e-8));
    }
  }
  CHECK(LiftProfile(ParamPoint::make(1.0, 1.0), kQuad).degenerate());
}

TEST_CASE("inner minimum is below every sampled gamma") {
  const auto pt = ParamPoint::make(1.0, 0.5);
  const LiftProfile profile(pt, kQuad);
  const auto fn = profile_fn(profile);
  const LiftedOptions options;
  const double c3 = 3.0;
  const double r_y = 0.4;
  const auto inner = lifted_inner_min(1.4, pt.r(), c3, r_y, fn, kOptTol, options);
  for (int k = 0; k < 64; ++k) {
    const double gamma = options.gamma_lo * std::pow(options.gamma_hi / options.gamma_lo, k / 63.0);
    CHECK(inner.value <= lifted_objective(1.4, pt.r(), c3, r_y, gamma, fn) + 1e-12);
  }
}

TEST_CASE("lifted bound at (1, 0.5) is a local optimum and lies above the plain bound") {
  const auto pt = ParamPoint::make(1.0, 0.5);
  const double alpha = 1.4;
  const LiftProfile profile(pt, kQuad);
  const auto res = phi0_lifted(alpha, pt, profile, kOptTol);
  CHECK(std::isfinite(res.phi0_bar));
  CHECK(res.gamma_sph_hat ==
        doctest::Approx((res.best.c3e + std::sqrt(res.best.c3e * res.best.c3e + 4.0)) / 4.0));
  const double plain = phi0_plain(alpha, pt, kQuad).phi0;
  CHECK(res.phi0_bar >= plain - 1e-6);

  // Dense local search over (c3, r_y) around the optimum, step 1e-3 in log
  // coordinates, each with its own inner minimum over gamma.
  const auto fn = profile_fn(profile);
  const LiftedOptions options;
  double best_nearby = -INFINITY;
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      const double c3 = res.best.c3 * std::exp(1e-3 * i);
      const double r_y = res.best.r_y * std::exp(1e-3 * j);
      best_nearby =
          std::max(best_nearby, lifted_inner_min(alpha, pt.r(), c3, r_y, fn, kOptTol, options).value);
    }
  }
  CHECK(best_nearby <= res.phi0_bar + 1e-9);
}

TEST_CASE("lifted bound reduces to the plain bound at r = 0") {
  const auto res = phi0_lifted(1.4, ParamPoint::make(1.0, 1.0), kQuad, kOptTol);
  CHECK(res.phi0_bar == 0.0);
}

TEST_CASE("lifted curve at c = 0.8 stays within 1e-2 of the plain curve") {
  for (int k = 0; k <= 8; ++k) {
    const auto pt = ParamPoint::make(0.8, std::sqrt(0.8) * k / 8.0);
    const double lifted = phi0_lifted(1.4, pt, kQuad, kOptTol).phi0_bar;
    const double plain = phi0_plain(1.4, pt, kQuad).phi0;
    CHECK(std::abs(lifted - plain) <= 1e-2);
  }
}

TEST_CASE("lifted c = 1 curve is nonincreasing just above alpha = 1.4") {
  std::vector<double> curve;
  for (int k = 0; k <= 20; ++k) {
    const auto pt = ParamPoint::make(1.0, k / 20.0);
    curve.push_back(phi0_lifted(1.41, pt, kQuad, kOptTol).phi0_bar);
  }
  for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] <= curve[k - 1] + 1e-10);
}

TEST_CASE("at alpha = 1.4 any rise of the lifted c = 1 curve stays below 1e-6") {
  std::vector<double> curve;
  for (int k = 0; k <= 20; ++k) {
    curve.push_back(phi0_lifted(1.4, ParamPoint::make(1.0, k / 20.0), kQuad, kOptTol).phi0_bar);
  }
  CHECK(oracles::largest_interior_bump(curve) < 1e-6);
}
