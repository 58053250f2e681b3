#include "phase_manifold/numerics/special.hpp"

#include <cmath>
#include <numbers>

namespace phase_manifold::numerics {

namespace {

// erfc(z) * exp(z^2) for z >= 6 via the Laplace continued fraction
// 1/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))).
double erfcx_large(double z) {
  double tail = z;
  for (int k = 80; k >= 1; --k) tail = z + 0.5 * k / tail;
  return std::numbers::inv_sqrtpi / tail;
}

}  // namespace

double log_erfc(double z) {
  if (z < 6.0) return std::log(std::erfc(z));
  return std::log(erfcx_large(z)) - z * z;
}

double exp_times_erfc(double a, double z) {
  if (z < 6.0) {
    const double e = std::erfc(z);
    if (a < 700.0) return std::exp(a) * e;
    return std::exp(a + std::log(e));
  }
  return std::exp(a + log_erfc(z));
}

}  // namespace phase_manifold::numerics
