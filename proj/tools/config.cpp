#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "io.hpp"
#include "phase_manifold/errors.hpp"

namespace phase_manifold::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw UsageError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": bad value for '" + key + "'");
  }
}

void read_algorithm_keys(const json& doc, algorithms::HybridConfig& cfg) {
  read(doc, "max_rounds", cfg.max_rounds, "config");
  if (doc.contains("grad")) {
    const json& g = doc.at("grad");
    check_keys(g, {"step_init", "armijo_c", "backtrack_factor", "grad_tol", "max_iters", "warm_step"},
               "grad");
    read(g, "step_init", cfg.grad.step_init, "grad");
    read(g, "armijo_c", cfg.grad.armijo_c, "grad");
    read(g, "backtrack_factor", cfg.grad.backtrack_factor, "grad");
    read(g, "grad_tol", cfg.grad.grad_tol, "grad");
    read(g, "max_iters", cfg.grad.max_iters, "grad");
    read(g, "warm_step", cfg.grad.warm_step, "grad");
  }
  if (doc.contains("barrier")) {
    const json& b = doc.at("barrier");
    check_keys(b, {"t0_init", "growth", "t0_max"}, "barrier");
    read(b, "t0_init", cfg.sched.t0_init, "barrier");
    read(b, "growth", cfg.sched.growth, "barrier");
    read(b, "t0_max", cfg.sched.t0_max, "barrier");
  }
  if (doc.contains("reshuffle")) {
    const json& r = doc.at("reshuffle");
    check_keys(r, {"fraction", "repeats"}, "reshuffle");
    read(r, "fraction", cfg.reshuffle.fraction, "reshuffle");
    read(r, "repeats", cfg.reshuffle.repeats, "reshuffle");
  }
}

void validate_algorithm_config(const algorithms::HybridConfig& cfg) {
  try {
    cfg.grad.validate();
    cfg.sched.validate();
    cfg.reshuffle.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (cfg.max_rounds < 1) throw UsageError("config: max_rounds must be >= 1");
}

}  // namespace

algorithms::HybridConfig parse_algorithm_config(const json& doc) {
  check_keys(doc, {"max_rounds", "grad", "barrier", "reshuffle"}, "config");
  algorithms::HybridConfig cfg;
  read_algorithm_keys(doc, cfg);
  validate_algorithm_config(cfg);
  return cfg;
}

SweepConfig parse_sweep_config(const json& doc) {
  check_keys(doc,
             {"preset", "n", "alpha_values", "trials_per_alpha", "algorithms", "master_seed",
              "success_tol", "max_rounds", "grad", "barrier", "reshuffle"},
             "config");
  std::string preset = "desk";
  read(doc, "preset", preset, "config");
  SweepConfig out;
  if (preset == "desk") {
    out.spec = experiments::desk_preset();
  } else if (preset == "full") {
    out.spec = experiments::full_preset();
  } else {
    throw UsageError("config: unknown preset '" + preset + "'");
  }
  read(doc, "n", out.spec.n, "config");
  read(doc, "alpha_values", out.spec.alpha_values, "config");
  read(doc, "trials_per_alpha", out.spec.trials_per_alpha, "config");
  read(doc, "master_seed", out.spec.master_seed, "config");
  read(doc, "success_tol", out.spec.success_tol, "config");
  if (doc.contains("algorithms")) {
    std::vector<std::string> names;
    read(doc, "algorithms", names, "config");
    out.spec.algorithms.clear();
    try {
      for (const auto& name : names) out.spec.algorithms.push_back(experiments::parse_algorithm(name));
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
  read_algorithm_keys(doc, out.algo);
  validate_algorithm_config(out.algo);
  out.algo.success_tol = out.spec.success_tol;
  try {
    out.spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return out;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  return parse_sweep_config(doc);
}

json to_json(const algorithms::HybridConfig& config) {
  return {{"max_rounds", config.max_rounds},
          {"success_tol", config.success_tol},
          {"grad",
           {{"step_init", config.grad.step_init},
            {"armijo_c", config.grad.armijo_c},
            {"backtrack_factor", config.grad.backtrack_factor},
            {"grad_tol", config.grad.grad_tol},
            {"max_iters", config.grad.max_iters},
            {"warm_step", config.grad.warm_step}}},
          {"barrier",
           {{"t0_init", config.sched.t0_init},
            {"growth", config.sched.growth},
            {"t0_max", config.sched.t0_max}}},
          {"reshuffle",
           {{"fraction", config.reshuffle.fraction}, {"repeats", config.reshuffle.repeats}}}};
}

json to_json(const SweepConfig& config) {
  json algos = json::array();
  for (auto a : config.spec.algorithms) algos.push_back(experiments::to_string(a));
  json out = to_json(config.algo);
  out["n"] = config.spec.n;
  out["alpha_values"] = config.spec.alpha_values;
  out["trials_per_alpha"] = config.spec.trials_per_alpha;
  out["algorithms"] = algos;
  out["master_seed"] = config.spec.master_seed;
  return out;
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("PHASE_MANIFOLD_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw UsageError("PHASE_MANIFOLD_SEED must be an unsigned integer");
  }
  return value;
}

}  // namespace phase_manifold::cli
