#include "phase_manifold/numerics/quadrature.hpp"

namespace phase_manifold::numerics {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0)) throw InvalidArgument("QuadratureSpec: abs_tol must be > 0");
  if (!(rel_tol > 0.0)) throw InvalidArgument("QuadratureSpec: rel_tol must be > 0");
  if (!(truncation_radius >= 6.0)) {
    throw InvalidArgument("QuadratureSpec: truncation_radius must be >= 6");
  }
  if (max_subdivisions < 10) throw InvalidArgument("QuadratureSpec: max_subdivisions must be >= 10");
}

}  // namespace phase_manifold::numerics
