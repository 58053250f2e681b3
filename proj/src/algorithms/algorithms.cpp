#include "phase_manifold/algorithms/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/power_iteration.hpp"

namespace phase_manifold::algorithms {

namespace {

void check_dim(const ProblemInstance& inst, const VectorXd& x, const char* who) {
  if (x.size() != inst.n()) {
    throw DimensionMismatch(std::string(who) + ": expected dimension " +
                            std::to_string(inst.n()) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

ProblemInstance ProblemInstance::make(MatrixXd A, VectorXd x_bar, std::uint64_t seed) {
  if (A.cols() != x_bar.size()) throw DimensionMismatch("ProblemInstance: A and x_bar disagree");
  if (std::abs(x_bar.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("ProblemInstance: x_bar must have unit norm");
  }
  ProblemInstance inst;
  inst.y = (A * x_bar).array().square().matrix();
  inst.A = std::move(A);
  inst.x_bar = std::move(x_bar);
  inst.seed = seed;
  return inst;
}

double f_plain(const ProblemInstance& inst, const VectorXd& x) {
  check_dim(inst, x, "f_plain");
  const VectorXd ax = inst.A * x;
  return (inst.y.array() - ax.array().square()).matrix().squaredNorm();
}

VectorXd grad_f_plain(const ProblemInstance& inst, const VectorXd& x) {
  check_dim(inst, x, "grad_f_plain");
  const VectorXd ax = inst.A * x;
  const VectorXd weights = ((inst.y.array() - ax.array().square()) * ax.array()).matrix();
  return -4.0 * (inst.A.transpose() * weights);
}

double f_bar(const ProblemInstance& inst, double t0, const VectorXd& x) {
  check_dim(inst, x, "f_bar");
  const double sq = x.squaredNorm();
  if (!(sq < 1.0)) throw InfeasiblePoint("f_bar: |x|^2 >= 1");
  return t0 * f_plain(inst, x) - std::log1p(-sq);
}

VectorXd grad_f_bar(const ProblemInstance& inst, double t0, const VectorXd& x) {
  check_dim(inst, x, "grad_f_bar");
  const double sq = x.squaredNorm();
  if (!(sq < 1.0)) throw InfeasiblePoint("grad_f_bar: |x|^2 >= 1");
  return t0 * grad_f_plain(inst, x) + (2.0 / (1.0 - sq)) * x;
}

void GradConfig::validate() const {
  if (!(step_init >= 0.0)) throw InvalidArgument("GradConfig: step_init must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidArgument("GradConfig: armijo_c in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InvalidArgument("GradConfig: backtrack_factor in (0,1)");
  }
  if (!(grad_tol >= 0.0)) throw InvalidArgument("GradConfig: grad_tol must be >= 0");
  if (max_iters < 1) throw InvalidArgument("GradConfig: max_iters must be >= 1");
}

GradConfig GradConfig::for_instance(const ProblemInstance& inst) const {
  GradConfig out = *this;
  if (out.step_init == 0.0) out.step_init = 1e-2 / static_cast<double>(inst.m());
  return out;
}

void BarrierSchedule::validate() const {
  if (!(t0_init > 0.0)) throw InvalidArgument("BarrierSchedule: t0_init must be > 0");
  if (!(growth > 1.0)) throw InvalidArgument("BarrierSchedule: growth must be > 1");
  if (!(t0_max >= t0_init)) throw InvalidArgument("BarrierSchedule: t0_max < t0_init");
}

std::vector<double> BarrierSchedule::stages() const {
  validate();
  std::vector<double> out;
  double t0 = t0_init;
  for (int k = 0;; ++k) {
    t0 = t0_init * std::pow(growth, k);
    out.push_back(t0);
    if (t0 >= t0_max) break;
  }
  return out;
}

DescentResult gradback(const Objective& objective, const Gradient& gradient, const VectorXd& x0,
                       const GradConfig& cfg, const Feasible& feasible) {
  cfg.validate();
  if (!(cfg.step_init > 0.0)) throw InvalidArgument("gradback: step_init must be > 0");
  if (feasible && !feasible(x0)) throw InfeasiblePoint("gradback: x0 is infeasible");
  DescentResult out;
  out.x = x0;
  out.value = objective(x0);
  out.max_sq_norm = x0.squaredNorm();
  double step = cfg.step_init / 2.0;
  VectorXd trial(x0.size());
  for (; out.iterations < cfg.max_iters; ++out.iterations) {
    const VectorXd g = gradient(out.x);
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= cfg.grad_tol * std::max(1.0, out.x.norm())) {
      out.converged = true;
      break;
    }
    double s = cfg.warm_step ? 2.0 * step : cfg.step_init;
    bool accepted = false;
    while (s >= 1e-16) {
      trial = out.x - s * g;
      if (!feasible || feasible(trial)) {
        const double value = objective(trial);
        if (value <= out.value - cfg.armijo_c * s * g2) {
          out.x = trial;
          out.value = value;
          accepted = true;
          break;
        }
      }
      s *= cfg.backtrack_factor;
    }
    if (!accepted) {
      out.stalled = true;
      break;
    }
    step = s;
    out.max_sq_norm = std::max(out.max_sq_norm, out.x.squaredNorm());
  }
  return out;
}

BarrierResult gradbar(const ProblemInstance& inst, const VectorXd& x0,
                      const BarrierSchedule& sched, const GradConfig& cfg) {
  check_dim(inst, x0, "gradbar");
  const GradConfig resolved = cfg.for_instance(inst);
  VectorXd x = x0;
  if (!(x.squaredNorm() < 1.0)) x *= 0.99 / x.norm();
  auto feasible = [](const VectorXd& v) { return v.squaredNorm() < 1.0; };
  BarrierResult out;
  for (double t0 : sched.stages()) {
    auto objective = [&](const VectorXd& v) { return f_bar(inst, t0, v); };
    auto gradient = [&](const VectorXd& v) { return grad_f_bar(inst, t0, v); };
    out.last = gradback(objective, gradient, x, resolved, feasible);
    x = out.last.x;
    out.stage_iters.push_back(out.last.iterations);
    out.total_iters += out.last.iterations;
    if (out.last.stalled) ++out.stalled_stages;
    out.max_sq_norm = std::max(out.max_sq_norm, out.last.max_sq_norm);
  }
  return out;
}

DescentResult gradplain(const ProblemInstance& inst, const VectorXd& x0, const GradConfig& cfg) {
  check_dim(inst, x0, "gradplain");
  auto objective = [&](const VectorXd& v) { return f_plain(inst, v); };
  auto gradient = [&](const VectorXd& v) { return grad_f_plain(inst, v); };
  return gradback(objective, gradient, x0, cfg.for_instance(inst), nullptr);
}

void ReshuffleConfig::validate() const {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("reshuffle: fraction in (0,1)");
  if (repeats < 1) throw InvalidArgument("reshuffle: repeats must be >= 1");
}

VectorXd reshuffle(const VectorXd& x, double fraction, int repeats,
                   const std::function<double(const VectorXd&)>& scorer,
                   numerics::GaussianSampler& rng) {
  ReshuffleConfig{fraction, repeats}.validate();
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0) return x;
  const auto k = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(fraction * n)));
  VectorXd best = x;
  double best_score = scorer(x);
  std::vector<std::size_t> order(n);
  for (int rep = 0; rep < repeats; ++rep) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.uniform_index(n - i);
      std::swap(order[i], order[j]);
    }
    VectorXd candidate = x;
    for (std::size_t i = 0; i < k; ++i) candidate[order[i]] = -candidate[order[i]];
    const double score = scorer(candidate);
    if (score < best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

bool success_test(const ProblemInstance& inst, const VectorXd& x_hat, double tol) {
  check_dim(inst, x_hat, "success_test");
  const double d = std::min((x_hat - inst.x_bar).norm(), (x_hat + inst.x_bar).norm());
  return d <= tol;
}

double overlap(const ProblemInstance& inst, const VectorXd& x_hat) {
  check_dim(inst, x_hat, "overlap");
  const double norm = x_hat.norm();
  if (norm == 0.0) return 0.0;
  return std::clamp(x_hat.dot(inst.x_bar) / norm, -1.0, 1.0);
}

VectorXd spectral_init(const ProblemInstance& inst, double tol, int max_iter) {
  auto apply = [&inst](const VectorXd& v) -> VectorXd {
    const VectorXd av = inst.A * v;
    return inst.A.transpose() * (inst.y.array() * av.array()).matrix();
  };
  const auto pair =
      numerics::power_iteration(apply, static_cast<int>(inst.n()), tol, max_iter, inst.seed);
  return 0.99 * pair.vector;
}

RunRecord hybrid(const ProblemInstance& inst, const VectorXd& x0, const HybridConfig& cfg,
                 std::uint64_t rng_seed) {
  check_dim(inst, x0, "hybrid");
  cfg.reshuffle.validate();
  if (cfg.max_rounds < 1) throw InvalidArgument("hybrid: max_rounds must be >= 1");
  numerics::GaussianSampler rng(rng_seed);
  auto scorer = [&inst](const VectorXd& v) { return f_plain(inst, v); };

  RunRecord rec;
  rec.seed = rng_seed;
  VectorXd x = x0;
  rec.max_traj_sq_norm = x.squaredNorm();
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    rec.hybrid_rounds = round;
    if (success_test(inst, x, cfg.success_tol)) {
      rec.success = true;
      break;
    }
    const BarrierResult bar = gradbar(inst, x, cfg.sched, cfg.grad);
    VectorXd a = reshuffle(bar.last.x, cfg.reshuffle.fraction, cfg.reshuffle.repeats, scorer, rng);
    const DescentResult plain = gradplain(inst, a, cfg.grad);
    x = reshuffle(plain.x, cfg.reshuffle.fraction, cfg.reshuffle.repeats, scorer, rng);
    rec.stage_iters.push_back(bar.total_iters);
    rec.stage_iters.push_back(plain.iterations);
    rec.stalled = rec.stalled || plain.stalled;
    rec.max_traj_sq_norm = std::max(rec.max_traj_sq_norm, plain.max_sq_norm);
    rec.round_overlaps.push_back(overlap(inst, x));
    if (success_test(inst, x, cfg.success_tol)) {
      rec.success = true;
      break;
    }
  }
  rec.x_hat = x;
  rec.overlap = overlap(inst, x);
  rec.sq_norm = x.squaredNorm();
  return rec;
}

}  // namespace phase_manifold::algorithms
