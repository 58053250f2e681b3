#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "phase_manifold/errors.hpp"
#include "phase_manifold/rdt/param_point.hpp"
#include "phase_manifold/rdt/plain.hpp"

using namespace phase_manifold;
using namespace phase_manifold::rdt;

namespace {
const numerics::QuadratureSpec kQuad;
}

TEST_CASE("param point construction") {
  const auto p = ParamPoint::make(0.7, 0.4);
  CHECK(p.r() == doctest::Approx(std::sqrt(0.7 - 0.16)).epsilon(1e-15));
  CHECK(p.r() * p.r() + p.x() * p.x() == doctest::Approx(p.c()).epsilon(1e-15));
  CHECK(ParamPoint::make(1.0, 1.0).r() == 0.0);
  CHECK(ParamPoint::make(1.0, 1.0 + 1e-14).r() == 0.0);
  CHECK_THROWS_AS(ParamPoint::make(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ParamPoint::make(1.0, -0.1), InvalidArgument);
  CHECK_THROWS_AS(ParamPoint::make(0.5, 0.8), InvalidArgument);
}

TEST_CASE("f_q at the corners") {
  CHECK(f_q_closed(ParamPoint::make(1.0, 1.0), kQuad) == 0.0);
  CHECK(f_q_closed(ParamPoint::make(1.0, 0.0), kQuad) ==
        doctest::Approx(2.0 - 4.0 / std::numbers::pi).epsilon(1e-10));
  CHECK(f_q_closed(ParamPoint::make(0.25, 0.5), kQuad) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("f_q agrees with the arcsine cross-moment identity") {
  for (double c : {0.05, 0.25, 0.5, 0.75, 1.0, 1.25, 2.0}) {
    for (int k = 0; k <= 10; ++k) {
      const double x = std::sqrt(c) * k / 10.0;
      const auto pt = ParamPoint::make(c, x);
      CHECK(f_q_closed(pt, kQuad) ==
            doctest::Approx(oracles::plain_fq_arcsine(c, x, pt.r())).epsilon(1e-9).scale(1e-12));
    }
  }
}

TEST_CASE("f_q agrees with Monte Carlo at (0.7, 0.4)") {
  const double c = 0.7;
  const double x = 0.4;
  const double r = std::sqrt(c - x * x);
  const auto mc = oracles::monte_carlo_2d(
      [&](double g0, double g1) {
        const double d = std::abs(g0) - std::abs(g0 * x + g1 * r);
        return d * d;
      },
      2000000, 99);
  const double got = f_q_closed(ParamPoint::make(c, x), kQuad);
  CHECK(std::abs(got - mc.mean) <= 4.0 * mc.stderr_);
}

TEST_CASE("phi0 invariants") {
  for (double alpha : {0.5, 1.2, 1.7932, 3.0}) {
    for (double c : {0.3, 1.0, 1.5}) {
      for (int k = 0; k <= 6; ++k) {
        const auto pt = ParamPoint::make(c, std::sqrt(c) * k / 6.0);
        const auto res = phi0_plain(alpha, pt, kQuad);
        const double s = std::sqrt(alpha * res.f_q);
        CHECK(res.phi0 >= 0.0);
        CHECK(res.phi0 == doctest::Approx(std::pow(std::max(s - pt.r(), 0.0), 2)).epsilon(1e-14));
        if (pt.r() > 0.0) {
          CHECK(res.r_y_hat == doctest::Approx(std::max(s / pt.r() - 1.0, 0.0)).epsilon(1e-14));
        }
      }
    }
  }
  CHECK(phi0_plain(1.7932, ParamPoint::make(1.0, 1.0), kQuad).phi0 == 0.0);
}

TEST_CASE("phi0 clamps to zero when sqrt(alpha f_q) <= r") {
  const auto pt = ParamPoint::make(1.0, 0.0);
  const double f_q = f_q_closed(pt, kQuad);
  const double alpha = 0.9 / f_q;  // sqrt(alpha f_q) < 1 = r
  CHECK(phi0_plain(alpha, pt, kQuad).phi0 == 0.0);
}

TEST_CASE("phi0 is nondecreasing in alpha") {
  const auto pt = ParamPoint::make(0.8, 0.3);
  double prev = -1.0;
  for (double alpha = 0.5; alpha <= 4.0; alpha += 0.25) {
    const double v = phi0_plain(alpha, pt, kQuad).phi0;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("plain c = 1 curve at the critical ratio has no interior maximum") {
  std::vector<double> curve;
  for (int k = 0; k <= 10; ++k) {
    curve.push_back(phi0_plain(1.7932, ParamPoint::make(1.0, k / 10.0), kQuad).phi0);
  }
  for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] <= curve[k - 1] + 1e-12);
  CHECK(oracles::largest_interior_bump(curve) == 0.0);
}

TEST_CASE("below the critical ratio the c = 1 curve rises away from x = 0") {
  std::vector<double> curve;
  for (int k = 0; k <= 20; ++k) {
    curve.push_back(phi0_plain(1.5, ParamPoint::make(1.0, k / 20.0), kQuad).phi0);
  }
  CHECK(oracles::largest_interior_bump(curve) > 1e-6);
}
