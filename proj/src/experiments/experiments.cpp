#include "phase_manifold/experiments/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/parallel.hpp"
#include "phase_manifold/numerics/sampler.hpp"

namespace phase_manifold::experiments {

using algorithms::HybridConfig;
using algorithms::ProblemInstance;
using algorithms::RunRecord;

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::hybrid: return "hybrid";
    case Algorithm::gradplain: return "gradplain";
    case Algorithm::gradbar: return "gradbar";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "hybrid") return Algorithm::hybrid;
  if (text == "gradplain") return Algorithm::gradplain;
  if (text == "gradbar") return Algorithm::gradbar;
  throw InvalidArgument("unknown algorithm '" + text + "'");
}

ProblemInstance generate_instance(int n, double alpha, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("generate_instance: n must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("generate_instance: alpha must be > 0");
  }
  const auto m = static_cast<Eigen::Index>(std::llround(alpha * n));
  if (m < 1) throw InvalidArgument("generate_instance: alpha * n rounds to zero rows");
  numerics::GaussianSampler rng(seed);
  Eigen::MatrixXd A(m, n);
  // Row-major fill so that a prefix of the stream fixes the first rows.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng();
  }
  Eigen::VectorXd x_bar(n);
  rng.fill({x_bar.data(), static_cast<std::size_t>(n)});
  x_bar /= x_bar.norm();
  return ProblemInstance::make(std::move(A), std::move(x_bar), seed);
}

RunRecord run_algorithm(Algorithm algorithm, const ProblemInstance& inst, const HybridConfig& cfg,
                        std::uint64_t rng_seed) {
  const Eigen::VectorXd x0 = algorithms::spectral_init(inst);
  if (algorithm == Algorithm::hybrid) return algorithms::hybrid(inst, x0, cfg, rng_seed);

  RunRecord rec;
  rec.seed = rng_seed;
  rec.hybrid_rounds = 1;
  if (algorithm == Algorithm::gradplain) {
    const auto d = algorithms::gradplain(inst, x0, cfg.grad);
    rec.x_hat = d.x;
    rec.stage_iters = {d.iterations};
    rec.stalled = d.stalled;
    rec.max_traj_sq_norm = d.max_sq_norm;
  } else {
    const auto b = algorithms::gradbar(inst, x0, cfg.sched, cfg.grad);
    rec.x_hat = b.last.x;
    rec.stage_iters = b.stage_iters;
    rec.stalled = b.stalled_stages > 0;
    rec.max_traj_sq_norm = std::max(x0.squaredNorm(), b.max_sq_norm);
  }
  rec.overlap = algorithms::overlap(inst, rec.x_hat);
  rec.round_overlaps = {rec.overlap};
  rec.sq_norm = rec.x_hat.squaredNorm();
  rec.success = algorithms::success_test(inst, rec.x_hat, cfg.success_tol);
  return rec;
}

void SweepSpec::validate() const {
  if (n < 10) throw InvalidArgument("sweep: n must be >= 10");
  if (trials_per_alpha < 1) throw InvalidArgument("sweep: trials_per_alpha must be >= 1");
  if (alpha_values.empty()) throw InvalidArgument("sweep: alpha_values is empty");
  if (!std::is_sorted(alpha_values.begin(), alpha_values.end())) {
    throw InvalidArgument("sweep: alpha_values must be sorted");
  }
  for (double a : alpha_values) {
    if (!(a > 1.0) || !std::isfinite(a)) throw InvalidArgument("sweep: every alpha must be > 1");
  }
  if (algorithms.empty()) throw InvalidArgument("sweep: no algorithms selected");
  if (!(success_tol > 0.0)) throw InvalidArgument("sweep: success_tol must be > 0");
}

SweepSpec desk_preset() {
  SweepSpec spec;
  spec.n = 100;
  spec.trials_per_alpha = 20;
  for (int k = 0; k <= 10; ++k) spec.alpha_values.push_back(1.2 + 0.2 * k);
  spec.algorithms = {Algorithm::hybrid, Algorithm::gradplain};
  return spec;
}

SweepSpec full_preset() {
  SweepSpec spec = desk_preset();
  spec.n = 300;
  return spec;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t alpha_index, int trial,
                         Algorithm algorithm) {
  return numerics::derive_seed(master, {static_cast<std::uint64_t>(alpha_index),
                                        static_cast<std::uint64_t>(trial),
                                        static_cast<std::uint64_t>(algorithm)});
}

TransitionTable run_sweep(const SweepSpec& spec, const HybridConfig& cfg, unsigned threads) {
  spec.validate();
  HybridConfig run_cfg = cfg;
  run_cfg.success_tol = spec.success_tol;

  TransitionTable table;
  for (Algorithm algo : spec.algorithms) {
    for (std::size_t a = 0; a < spec.alpha_values.size(); ++a) {
      for (int t = 0; t < spec.trials_per_alpha; ++t) {
        table.trials.push_back(
            {algo, spec.alpha_values[a], a, t, trial_seed(spec.master_seed, a, t, algo), {}});
      }
    }
  }

  numerics::parallel_for(table.trials.size(), threads, [&](std::size_t k) {
    TrialResult& tr = table.trials[k];
    // The instance depends on (alpha index, trial) only, so every algorithm
    // sees the same problems.
    const std::uint64_t inst_seed =
        numerics::derive_seed(spec.master_seed, {static_cast<std::uint64_t>(tr.alpha_index),
                                                 static_cast<std::uint64_t>(tr.trial)});
    try {
      const auto inst = generate_instance(spec.n, tr.alpha, inst_seed);
      tr.record = run_algorithm(tr.algorithm, inst, run_cfg, tr.seed);
    } catch (const std::exception& e) {
      tr.record = RunRecord{};
      tr.record.seed = tr.seed;
      tr.record.success = false;
      tr.record.failure = e.what();
    }
  });

  std::size_t k = 0;
  while (k < table.trials.size()) {
    const TrialResult& first = table.trials[k];
    TransitionRow row{first.algorithm, first.alpha, 0, 0, 0.0, 0.0, 0.0, 0.0};
    double rounds = 0.0;
    double overlap = 0.0;
    for (; k < table.trials.size() && table.trials[k].algorithm == first.algorithm &&
           table.trials[k].alpha_index == first.alpha_index;
         ++k) {
      const RunRecord& rec = table.trials[k].record;
      ++row.trials;
      if (rec.success) ++row.successes;
      rounds += rec.hybrid_rounds;
      overlap += std::abs(rec.overlap);
      row.max_traj_sq_norm = std::max(row.max_traj_sq_norm, rec.max_traj_sq_norm);
    }
    row.success_rate = static_cast<double>(row.successes) / row.trials;
    row.mean_rounds = rounds / row.trials;
    row.mean_final_overlap = overlap / row.trials;
    table.rows.push_back(row);
  }
  return table;
}

std::vector<OverlayRow> theoretical_overlay(double alpha_lo, double alpha_hi,
                                            const std::vector<manifold::Variant>& variants,
                                            double tol, const manifold::BoundOptions& options) {
  std::vector<OverlayRow> rows;
  const manifold::CriticalAlphaSpec spec;
  for (const auto& v : variants) {
    rows.push_back({v, manifold::critical_alpha(v, manifold::Predicate::c1_curve_monotone,
                                                alpha_lo, alpha_hi, tol, spec, options)});
  }
  return rows;
}

}  // namespace phase_manifold::experiments
