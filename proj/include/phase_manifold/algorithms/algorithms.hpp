#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phase_manifold/numerics/sampler.hpp"

namespace phase_manifold::algorithms {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Sensing matrix A (m x n), planted unit-norm signal x_bar and y = (A x_bar)^2.
struct ProblemInstance {
  MatrixXd A;
  VectorXd x_bar;
  VectorXd y;
  std::uint64_t seed = 0;

  // Computes y from A and x_bar; x_bar must have unit norm (to 1e-12).
  static ProblemInstance make(MatrixXd A, VectorXd x_bar, std::uint64_t seed);

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return A.cols(); }
};

// sum_i (y_i - (a_i . x)^2)^2
double f_plain(const ProblemInstance& inst, const VectorXd& x);
VectorXd grad_f_plain(const ProblemInstance& inst, const VectorXd& x);

// Barrier objective t0 f_plain(x) - log(1 - |x|^2); InfeasiblePoint when |x|^2 >= 1.
double f_bar(const ProblemInstance& inst, double t0, const VectorXd& x);
VectorXd grad_f_bar(const ProblemInstance& inst, double t0, const VectorXd& x);

struct GradConfig {
  double step_init = 0.0;  // 0: 1e-2 / m, resolved by for_instance()
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double grad_tol = 1e-8;
  int max_iters = 5000;
  // true: each iteration first tries twice the last accepted step;
  // false: every line search starts from step_init.
  bool warm_step = true;

  void validate() const;
  GradConfig for_instance(const ProblemInstance& inst) const;
};

struct BarrierSchedule {
  double t0_init = 5e-5;
  double growth = 1.2;
  double t0_max = 1e7;

  void validate() const;
  // t0_init * growth^k for k = 0, 1, ... up to the first value >= t0_max.
  std::vector<double> stages() const;
};

struct DescentResult {
  VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // gradient test met
  bool stalled = false;    // line search shrank the step below 1e-16
  double max_sq_norm = 0.0;  // over x0 and all accepted iterates
};

using Objective = std::function<double(const VectorXd&)>;
using Gradient = std::function<VectorXd(const VectorXd&)>;
using Feasible = std::function<bool(const VectorXd&)>;

// Gradient descent with Armijo backtracking from step_init (or twice the last
// accepted step when warm_step is set); trial points that are infeasible or
// fail the sufficient-decrease test are shrunk by backtrack_factor. Stops when |grad| <= grad_tol * max(1, |x|), after
// max_iters, or on a stall.
DescentResult gradback(const Objective& objective, const Gradient& gradient, const VectorXd& x0,
                       const GradConfig& cfg, const Feasible& feasible);

struct BarrierResult {
  DescentResult last;
  std::vector<int> stage_iters;
  int total_iters = 0;
  int stalled_stages = 0;
  double max_sq_norm = 0.0;  // over all stages
};

// gradback on f_bar(t0; .) over the schedule, warm-started stage to stage.
// x0 with |x0|^2 >= 1 is rescaled to norm 0.99.
BarrierResult gradbar(const ProblemInstance& inst, const VectorXd& x0,
                      const BarrierSchedule& sched, const GradConfig& cfg);

// Unconstrained gradback on f_plain.
DescentResult gradplain(const ProblemInstance& inst, const VectorXd& x0, const GradConfig& cfg);

struct ReshuffleConfig {
  double fraction = 0.075;
  int repeats = 10;

  void validate() const;
};

// Flips the signs of a uniformly random ceil(fraction * n)-subset of
// coordinates, `repeats` times independently, and returns the lowest-scoring
// candidate. x itself competes and wins ties.
VectorXd reshuffle(const VectorXd& x, double fraction, int repeats,
                   const std::function<double(const VectorXd&)>& scorer,
                   numerics::GaussianSampler& rng);

// min(|x_hat - x_bar|, |x_hat + x_bar|) <= tol.
bool success_test(const ProblemInstance& inst, const VectorXd& x_hat, double tol = 1e-3);

// x_hat . x_bar / |x_hat| (0 for x_hat = 0).
double overlap(const ProblemInstance& inst, const VectorXd& x_hat);

// Top eigenvector of A^T diag(y) A by power iteration on the matrix-free
// operator, scaled to norm 0.99.
VectorXd spectral_init(const ProblemInstance& inst, double tol = 1e-10, int max_iter = 100000);

struct RunRecord {
  VectorXd x_hat;
  double overlap = 0.0;
  double sq_norm = 0.0;
  std::vector<int> stage_iters;
  int hybrid_rounds = 0;
  bool success = false;
  std::uint64_t seed = 0;
  std::vector<double> round_overlaps;
  double max_traj_sq_norm = 0.0;
  bool stalled = false;
  std::string failure;  // empty unless a numerical failure ended the run
};

struct HybridConfig {
  BarrierSchedule sched;
  GradConfig grad;
  ReshuffleConfig reshuffle;
  int max_rounds = 4;
  double success_tol = 1e-3;
};

// Rounds of gradbar -> reshuffle -> gradplain -> reshuffle, stopping as soon
// as success_test holds (checked before and after each round). rng_seed
// drives the reshuffle subsets.
RunRecord hybrid(const ProblemInstance& inst, const VectorXd& x0, const HybridConfig& cfg,
                 std::uint64_t rng_seed);

}  // namespace phase_manifold::algorithms
