#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "phase_manifold/algorithms/algorithms.hpp"
#include "phase_manifold/experiments/experiments.hpp"

namespace phase_manifold::cli {

// Sweep configuration file (JSON). Every key is optional; "preset" selects
// the starting point ("desk" by default, or "full") and the remaining keys
// override it:
//
//   n, alpha_values, trials_per_alpha, algorithms, master_seed, success_tol,
//   max_rounds,
//   grad      { step_init, armijo_c, backtrack_factor, grad_tol, max_iters, warm_step },
//   barrier   { t0_init, growth, t0_max },
//   reshuffle { fraction, repeats }
//
// Unknown keys and wrongly typed values raise UsageError.
struct SweepConfig {
  experiments::SweepSpec spec;
  algorithms::HybridConfig algo;
};

SweepConfig parse_sweep_config(const nlohmann::json& doc);
SweepConfig load_sweep_config(const std::filesystem::path& path);

// Only the algorithm keys (max_rounds, grad, barrier, reshuffle) are accepted.
algorithms::HybridConfig parse_algorithm_config(const nlohmann::json& doc);

nlohmann::json to_json(const SweepConfig& config);
nlohmann::json to_json(const algorithms::HybridConfig& config);

// PHASE_MANIFOLD_SEED, when set to an unsigned integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace phase_manifold::cli
