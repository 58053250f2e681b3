#pragma once

#include <vector>

namespace phase_manifold::numerics {

// Real nonnegative roots of z^3 + p z + q = 0, together with the boundary
// candidate z = 0. Sorted ascending, duplicates removed.
struct CubicCandidates {
  double p_c = 0.0;
  double q_c = 0.0;
  std::vector<double> candidates;
};

CubicCandidates cubic_real_nonneg_roots(double p_c, double q_c);

// Same root set written into a caller-owned buffer of capacity 4; returns the
// count. Used on hot paths to avoid allocation.
int cubic_real_nonneg_roots(double p_c, double q_c, double* out);

}  // namespace phase_manifold::numerics
