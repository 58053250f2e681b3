#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phase_manifold/algorithms/algorithms.hpp"
#include "phase_manifold/manifold/manifold.hpp"

namespace phase_manifold::experiments {

enum class Algorithm { hybrid, gradplain, gradbar };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

// m = round(alpha * n) rows of iid N(0,1) entries and a normalized Gaussian
// signal, both drawn from one stream seeded with `seed`.
algorithms::ProblemInstance generate_instance(int n, double alpha, std::uint64_t seed);

// One run from the spectral initializer. gradplain and gradbar report a
// single round; their max_traj_sq_norm covers the whole descent.
algorithms::RunRecord run_algorithm(Algorithm algorithm, const algorithms::ProblemInstance& inst,
                                    const algorithms::HybridConfig& cfg, std::uint64_t rng_seed);

struct SweepSpec {
  int n = 100;
  std::vector<double> alpha_values;
  int trials_per_alpha = 20;
  std::vector<Algorithm> algorithms{Algorithm::hybrid};
  std::uint64_t master_seed = 1;
  double success_tol = 1e-3;

  void validate() const;
};

// n = 100, 20 trials, alpha in {1.2, 1.4, ..., 3.2}, hybrid and gradplain.
SweepSpec desk_preset();
// n = 300 over the same alpha values; expect hours.
SweepSpec full_preset();

struct TrialResult {
  Algorithm algorithm;
  double alpha;
  std::size_t alpha_index;
  int trial;
  std::uint64_t seed;
  algorithms::RunRecord record;
};

struct TransitionRow {
  Algorithm algorithm;
  double alpha;
  int trials;
  int successes;
  double success_rate;
  double mean_rounds;
  double mean_final_overlap;
  double max_traj_sq_norm;
};

struct TransitionTable {
  std::vector<TransitionRow> rows;
  std::vector<TrialResult> trials;  // sorted by (algorithm, alpha index, trial)
};

// Seed of one trial: derive_seed(master, {alpha_index, trial, algorithm id}).
std::uint64_t trial_seed(std::uint64_t master, std::size_t alpha_index, int trial,
                         Algorithm algorithm);

// Trials run in parallel on `threads` workers (0 = machine parallelism). A
// trial that throws is recorded as a failure with its message.
TransitionTable run_sweep(const SweepSpec& spec, const algorithms::HybridConfig& cfg,
                          unsigned threads = 0);

struct OverlayRow {
  manifold::Variant variant;
  double critical_alpha;
};

// critical_alpha of the c = 1 curve predicate per variant over [lo, hi].
std::vector<OverlayRow> theoretical_overlay(double alpha_lo, double alpha_hi,
                                            const std::vector<manifold::Variant>& variants,
                                            double tol, const manifold::BoundOptions& options);

}  // namespace phase_manifold::experiments
