#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace phase_manifold::numerics {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct EigenPair {
  double value;
  Eigen::VectorXd vector;  // unit norm
  int iterations;
};

// Dominant eigenpair of a symmetric PSD operator. Converged when
// ||M v - lambda v|| <= tol * lambda. The start vector is drawn from a seeded
// Gaussian stream, so results are deterministic. For a degenerate top
// eigenvalue the converged iterate is returned as-is.
EigenPair power_iteration(const LinearOperator& apply, int dim, double tol, int max_iter,
                          std::uint64_t start_seed = 0x5eed5eedULL);

}  // namespace phase_manifold::numerics
