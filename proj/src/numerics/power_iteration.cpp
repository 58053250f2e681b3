#include "phase_manifold/numerics/power_iteration.hpp"

#include <string>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/sampler.hpp"

namespace phase_manifold::numerics {

EigenPair power_iteration(const LinearOperator& apply, int dim, double tol, int max_iter,
                          std::uint64_t start_seed) {
  if (dim < 1) throw InvalidArgument("power_iteration: dim must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("power_iteration: tol must be positive");

  GaussianSampler sampler(start_seed);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = sampler();
  v.normalize();

  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd mv = apply(v);
    const double lambda = v.dot(mv);
    const double residual = (mv - lambda * v).norm();
    if (residual <= tol * lambda || mv.norm() == 0.0) {
      return {lambda, v, it};
    }
    v = mv / mv.norm();
  }
  throw NonConvergence("power_iteration: no convergence after " + std::to_string(max_iter) +
                       " iterations");
}

}  // namespace phase_manifold::numerics
