#include "phase_manifold/numerics/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace phase_manifold::numerics {

namespace {

double polish(double z, double p, double q) {
  for (int it = 0; it < 3; ++it) {
    const double value = (z * z + p) * z + q;
    const double slope = 3.0 * z * z + p;
    if (slope == 0.0) break;
    const double next = z - value / slope;
    const double next_value = (next * next + p) * next + q;
    if (!(std::abs(next_value) < std::abs(value))) break;
    z = next;
  }
  return z;
}

}  // namespace

int cubic_real_nonneg_roots(double p_c, double q_c, double* out) {
  int count = 0;
  out[count++] = 0.0;
  double roots[3];
  int n_roots = 0;

  const double disc = 0.25 * q_c * q_c + p_c * p_c * p_c / 27.0;
  if (disc >= 0.0) {
    // One real root (Cardano). Take the larger-magnitude cube root and recover
    // the other from u*v = -p/3 to avoid cancellation.
    const double half_q = -0.5 * q_c;
    const double s = std::sqrt(disc);
    const double u = std::cbrt(half_q + (half_q >= 0.0 ? s : -s));
    const double z = (u == 0.0) ? 0.0 : u - p_c / (3.0 * u);
    roots[n_roots++] = z;
  } else {
    // Three real roots, trigonometric form (p < 0 here).
    const double m = 2.0 * std::sqrt(-p_c / 3.0);
    const double arg = std::clamp(1.5 * q_c / p_c * std::sqrt(-3.0 / p_c), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots[n_roots++] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    }
  }

  for (int k = 0; k < n_roots; ++k) {
    const double z = polish(roots[k], p_c, q_c);
    if (!(z > 0.0) || !std::isfinite(z)) continue;
    bool duplicate = false;
    for (int j = 0; j < count; ++j) {
      if (out[j] == z) duplicate = true;
    }
    if (!duplicate) out[count++] = z;
  }
  std::sort(out, out + count);
  return count;
}

CubicCandidates cubic_real_nonneg_roots(double p_c, double q_c) {
  double buffer[4];
  const int count = cubic_real_nonneg_roots(p_c, q_c, buffer);
  return {p_c, q_c, std::vector<double>(buffer, buffer + count)};
}

}  // namespace phase_manifold::numerics
