#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "phase_manifold/errors.hpp"

namespace phase_manifold::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  // Half-width of the integration window, in standard deviations.
  double truncation_radius = 10.0;
  int max_subdivisions = 400;

  void validate() const;
};

enum class Domain { half_line, full_line };

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [lo, hi]: the panel
// with the largest error estimate is bisected until the summed estimate falls
// below max(abs_tol, rel_tol*|I|). `initial_panels` equal pieces seed the
// refinement.
template <class F>
double integrate_adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec,
                          int initial_panels = 1) {
  if (!(lo < hi)) return 0.0;
  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  const double width = (hi - lo) / initial_panels;
  for (int k = 0; k < initial_panels; ++k) {
    const double a = lo + k * width;
    const double b = (k + 1 == initial_panels) ? hi : a + width;
    auto p = detail::gauss_kronrod15(f, a, b);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int panels = initial_panels;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (panels >= spec.max_subdivisions) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "adaptive quadrature: subdivision limit %d reached, error estimate %.3g "
                    "(target %.3g)",
                    spec.max_subdivisions, total_err,
                    std::max(spec.abs_tol, spec.rel_tol * std::abs(total)));
      throw NonConvergence(buf);
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      // Panel cannot be split further in floating point.
      throw NonConvergence("adaptive quadrature: panel collapsed to machine precision");
    }
    auto left = detail::gauss_kronrod15(f, worst.lo, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed drift from incremental updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

inline double standard_normal_pdf(double g) {
  return std::exp(-0.5 * g * g) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

// Integral of f(g) against the standard Gaussian density, over [-R, R]
// (full_line) or [0, R] (half_line). The half-line form is NOT doubled.
template <class F>
double gauss_weighted_integral(F&& f, Domain domain, const QuadratureSpec& spec) {
  const double radius = spec.truncation_radius;
  auto weighted = [&f](double g) { return f(g) * standard_normal_pdf(g); };
  if (domain == Domain::full_line) {
    return integrate_adaptive(weighted, -radius, radius, spec, 4);
  }
  return integrate_adaptive(weighted, 0.0, radius, spec, 2);
}

}  // namespace phase_manifold::numerics
