#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "phase_manifold/errors.hpp"

namespace phase_manifold::numerics {

struct ScalarExtremum {
  double arg;
  double value;
};

enum class GridSpacing { automatic, linear, logarithmic };

struct ScalarSearchOptions {
  int grid_points = 64;
  // automatic: logarithmic when lo > 0, linear otherwise.
  GridSpacing spacing = GridSpacing::automatic;
  int max_golden_iters = 300;
};

namespace detail {

inline double finite_or(double v, double fallback) { return std::isnan(v) ? fallback : v; }

}  // namespace detail

// Coarse grid scan followed by golden-section refinement of the best grid
// cell. Returns a local maximizer; the value is never below the best sampled
// grid value. The final bracket width is <= tol (in the argument's units).
template <class F>
ScalarExtremum maximize_scalar(F&& f, double lo, double hi, double tol,
                               ScalarSearchOptions options = {}) {
  if (!(lo < hi)) throw DegenerateBracket("maximize_scalar: need lo < hi");
  if (!(tol > 0.0)) throw InvalidArgument("maximize_scalar: tol must be positive");
  const int n = std::max(options.grid_points, 3);
  const bool logarithmic = options.spacing == GridSpacing::logarithmic ||
                           (options.spacing == GridSpacing::automatic && lo > 0.0);
  if (logarithmic && !(lo > 0.0)) {
    throw InvalidArgument("maximize_scalar: logarithmic grid needs lo > 0");
  }
  const double ninf = -std::numeric_limits<double>::infinity();
  const double s_lo = logarithmic ? std::log(lo) : lo;
  const double s_hi = logarithmic ? std::log(hi) : hi;
  auto to_arg = [&](double s) { return logarithmic ? std::exp(s) : s; };
  auto eval = [&](double s) { return detail::finite_or(f(to_arg(s)), ninf); };

  std::vector<double> values(n);
  int best = 0;
  for (int k = 0; k < n; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / (n - 1);
    values[k] = eval(s);
    if (values[k] > values[best]) best = k;
  }
  const double step = (s_hi - s_lo) / (n - 1);
  double a = s_lo + step * std::max(best - 1, 0);
  double b = s_lo + step * std::min(best + 1, n - 1);
  ScalarExtremum result{to_arg(s_lo + step * best), values[best]};

  constexpr double kInvPhi = 0.6180339887498948482;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int it = 0; it < options.max_golden_iters && to_arg(b) - to_arg(a) > tol; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = eval(x2);
    }
  }
  const double s_mid = 0.5 * (a + b);
  const double f_mid = eval(s_mid);
  if (f_mid >= result.value) result = {to_arg(s_mid), f_mid};
  if (f1 > result.value) result = {to_arg(x1), f1};
  if (f2 > result.value) result = {to_arg(x2), f2};
  return result;
}

template <class F>
ScalarExtremum minimize_scalar(F&& f, double lo, double hi, double tol,
                               ScalarSearchOptions options = {}) {
  auto r = maximize_scalar([&f](double t) { return -f(t); }, lo, hi, tol, options);
  return {r.arg, -r.value};
}

struct SimplexResult {
  std::vector<double> arg;
  double value;
  int evaluations;
};

// Nelder-Mead simplex minimization (standard reflection/expansion/contraction/
// shrink coefficients 1, 2, 1/2, 1/2). Stops when both the simplex diameter
// (max coordinate spread) is <= xtol and the value spread is <= ftol, or the
// evaluation budget is spent.
template <class F>
SimplexResult nelder_mead_minimize(F&& f, std::vector<double> start, double initial_step,
                                   double xtol, double ftol, int max_evals) {
  const std::size_t dim = start.size();
  const double inf = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double>& p) { return detail::finite_or(f(p), inf); };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1);
  for (std::size_t k = 0; k < dim; ++k) simplex[k + 1][k] += initial_step;
  int evals = 0;
  for (std::size_t k = 0; k <= dim; ++k) {
    values[k] = eval(simplex[k]);
    ++evals;
  }
  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  auto affine = [&](const std::vector<double>& centroid, const std::vector<double>& worst,
                    double t) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = centroid[i] + t * (worst[i] - centroid[i]);
    return p;
  };

  while (evals < max_evals) {
    sort_simplex();
    double spread = 0.0;
    for (std::size_t k = 1; k <= dim; ++k) {
      for (std::size_t i = 0; i < dim; ++i) {
        spread = std::max(spread, std::abs(simplex[k][i] - simplex[0][i]));
      }
    }
    if (spread <= xtol && values[dim] - values[0] <= ftol) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[k][i] / dim;
    }
    const auto& worst = simplex[dim];
    auto reflected = affine(centroid, worst, -1.0);
    const double fr = eval(reflected);
    ++evals;
    if (fr < values[0]) {
      auto expanded = affine(centroid, worst, -2.0);
      const double fe = eval(expanded);
      ++evals;
      if (fe < fr) {
        simplex[dim] = expanded;
        values[dim] = fe;
      } else {
        simplex[dim] = reflected;
        values[dim] = fr;
      }
      continue;
    }
    if (fr < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = fr;
      continue;
    }
    const bool outside = fr < values[dim];
    auto contracted = affine(centroid, worst, outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    ++evals;
    if (fc < std::min(fr, values[dim])) {
      simplex[dim] = contracted;
      values[dim] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= dim; ++k) {
      for (std::size_t i = 0; i < dim; ++i) {
        simplex[k][i] = simplex[0][i] + 0.5 * (simplex[k][i] - simplex[0][i]);
      }
      values[k] = eval(simplex[k]);
      ++evals;
    }
  }
  sort_simplex();
  return {simplex[0], values[0], evals};
}

}  // namespace phase_manifold::numerics
