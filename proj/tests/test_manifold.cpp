#include <doctest.h>

#include <cmath>
#include <numeric>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/manifold/manifold.hpp"

using namespace phase_manifold;
using namespace phase_manifold::manifold;

namespace {

// Synthetic grid on [0, 1]^2 filled from h(c, x), every node present.
template <class H>
ManifoldGrid synthetic(int n, H h) {
  ManifoldGrid g;
  for (int k = 0; k < n; ++k) {
    g.c_axis.push_back(n == 1 ? 0.0 : static_cast<double>(k) / (n - 1));
    g.x_axis.push_back(n == 1 ? 0.0 : static_cast<double>(k) / (n - 1));
  }
  for (double c : g.c_axis) {
    for (double x : g.x_axis) g.values.emplace_back(h(c, x));
  }
  return g;
}

double basin_total(const FunnelReport& r) {
  return std::accumulate(r.funnel_points.begin(), r.funnel_points.end(), 0.0,
                         [](double s, const FunnelPoint& f) { return s + f.basin_fraction; });
}

}  // namespace

TEST_CASE("variant names round-trip") {
  for (const char* name : {"plain", "lifted", "plain_sq", "lifted_sq"}) {
    CHECK(to_string(parse_variant(name)) == name);
  }
  const auto b = parse_variant("barrier:2.5");
  CHECK(b.kind == VariantKind::barrier);
  CHECK(b.t0 == 2.5);
  CHECK_THROWS_AS(parse_variant("cubic"), InvalidArgument);
  CHECK(to_string(parse_predicate("single_funnel")) == "single_funnel");
  CHECK(to_string(parse_predicate("c1_curve_monotone")) == "c1_curve_monotone");
  CHECK_THROWS_AS(parse_predicate("x"), InvalidArgument);
}

TEST_CASE("axis sampling") {
  const auto p = AxisRange{0.0, 1.0, 5}.points();
  REQUIRE(p.size() == 5);
  CHECK(p.front() == 0.0);
  CHECK(p.back() == 1.0);
  CHECK(AxisRange{0.3, 0.9, 1}.points() == std::vector<double>{0.3});
  CHECK_THROWS_AS(AxisRange({1.0, 0.0, 5}).validate("c"), InvalidArgument);
  CHECK_THROWS_AS(AxisRange({0.0, 1.0, 0}).validate("c"), InvalidArgument);
}

TEST_CASE("a tilted plane has one funnel at its lowest corner") {
  const auto g = synthetic(15, [](double c, double x) { return c + 2.0 * x; });
  const auto r = detect_funnels(g);
  REQUIRE(r.count == 1);
  CHECK(r.funnel_points[0].c == 0.0);
  CHECK(r.funnel_points[0].x == 0.0);
  CHECK(r.funnel_points[0].boundary);
  CHECK(basin_total(r) == doctest::Approx(1.0));
}

TEST_CASE("two separated wells give two funnels") {
  auto well = [](double c, double x, double c0, double x0, double depth) {
    return -depth * std::exp(-((c - c0) * (c - c0) + (x - x0) * (x - x0)) / 0.02);
  };
  const auto g = synthetic(31, [&](double c, double x) {
    // The shallow bowl keeps the far corners from forming flat plateaus.
    const double bowl = 0.05 * ((c - 0.5) * (c - 0.5) + (x - 0.5) * (x - 0.5));
    return well(c, x, 0.25, 0.25, 1.0) + well(c, x, 0.75, 0.75, 0.6) + bowl;
  });
  const auto r = detect_funnels(g);
  REQUIRE(r.count == 2);
  CHECK(basin_total(r) == doctest::Approx(1.0));
  bool deep = false;
  bool shallow = false;
  for (const auto& f : r.funnel_points) {
    if (std::abs(f.c - 0.25) < 0.04 && std::abs(f.x - 0.25) < 0.04) deep = true;
    if (std::abs(f.c - 0.75) < 0.04 && std::abs(f.x - 0.75) < 0.04) shallow = true;
    CHECK_FALSE(f.boundary);
  }
  CHECK(deep);
  CHECK(shallow);
  // Every present node flows into exactly one funnel.
  for (int b : r.basin) CHECK((b == 0 || b == 1));
}

TEST_CASE("funnel count is invariant under positive scaling and shifts") {
  auto h = [](double c, double x) { return std::sin(6.0 * c) * std::cos(5.0 * x); };
  const auto g = synthetic(25, h);
  const auto base = detect_funnels(g).count;
  const auto scaled = synthetic(25, [&](double c, double x) { return 7.0 * h(c, x) + 3.0; });
  CHECK(detect_funnels(scaled).count == base);
}

TEST_CASE("a single node is one funnel") {
  const auto g = synthetic(1, [](double, double) { return 0.4; });
  const auto r = detect_funnels(g);
  CHECK(r.count == 1);
  CHECK(r.funnel_points[0].basin_fraction == 1.0);
}

TEST_CASE("a flat surface is one plateau funnel") {
  const auto g = synthetic(6, [](double, double) { return 1.0; });
  const auto r = detect_funnels(g);
  CHECK(r.count == 1);
  CHECK(r.funnel_points[0].plateau_nodes == 36);
}

TEST_CASE("curve monotonicity predicate") {
  CHECK(curve_monotone({3.0, 2.0, 2.0, 1.0}, 0.0));
  CHECK_FALSE(curve_monotone({3.0, 1.0, 2.0, 0.5}, 0.0));
  CHECK(curve_monotone({3.0, 1.0, 1.0 + 1e-12, 0.5}, 1e-9));
  // A rise at the right end is not an interior maximum.
  CHECK(curve_monotone({3.0, 1.0, 2.0}, 0.0));
}

TEST_CASE("plain manifold has two funnels below and one above the critical ratio") {
  const BoundOptions options;
  const GridSpec grid;
  const auto below = detect_funnels(build_manifold(1.5, Variant{}, grid, options));
  const auto above = detect_funnels(build_manifold(2.3, Variant{}, grid, options));
  CHECK(below.count == 2);
  CHECK(above.count == 1);
  CHECK(basin_total(below) == doctest::Approx(1.0));
  CHECK(above.funnel_points[0].x == doctest::Approx(1.0));
}

TEST_CASE("grid skips infeasible nodes") {
  GridSpec grid;
  grid.c = {0.25, 1.0, 4};
  grid.x = {0.0, 1.0, 5};
  const auto g = build_manifold(2.0, Variant{}, grid, BoundOptions{});
  CHECK_FALSE(g.feasible(0, 4));  // x = 1 > sqrt(0.25)
  CHECK(g.feasible(3, 4));
  CHECK(g.failed_nodes == 0);
  for (std::size_t i = 0; i < g.nc(); ++i) {
    for (std::size_t j = 0; j < g.nx(); ++j) {
      CHECK(g.feasible(i, j) == node_feasible(Variant{}, g.c_axis[i], g.x_axis[j]));
    }
  }
}

TEST_CASE("barrier manifold") {
  GridSpec grid;
  grid.c = {0.1, 1.0, 10};
  grid.x = {0.0, 1.0, 10};
  const BoundOptions options;
  const auto g = barrier_manifold(2.0, 3.0, grid, options);
  CHECK(g.variant.kind == VariantKind::barrier);
  for (std::size_t j = 0; j < g.nx(); ++j) CHECK_FALSE(g.feasible(g.nc() - 1, j));  // c = 1
  const auto pt = rdt::ParamPoint::make(0.5, 0.3);
  const double plain = evaluate_bound(2.0, Variant{}, pt, options);
  CHECK(evaluate_bound(2.0, Variant::barrier(3.0), pt, options) ==
        doctest::Approx(3.0 * plain - std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("critical alpha rejects a bracket that does not straddle") {
  CriticalAlphaSpec spec;
  spec.curve_x = {0.0, 1.0, 41};
  CHECK_THROWS_AS(critical_alpha(Variant{}, Predicate::c1_curve_monotone, 2.0, 3.0, 1e-2, spec,
                                 BoundOptions{}),
                  BadBracket);
}

TEST_CASE("critical alpha of the plain c = 1 curve") {
  CriticalAlphaSpec spec;
  spec.curve_x = {0.0, 1.0, 201};
  const double a = critical_alpha(Variant{}, Predicate::c1_curve_monotone, 1.2, 2.5, 1e-3, spec,
                                  BoundOptions{});
  CHECK(std::abs(a - 1.7932) <= 1e-2);
}
