#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "io.hpp"
#include "phase_manifold/errors.hpp"
#include "phase_manifold/experiments/experiments.hpp"
#include "phase_manifold/manifold/manifold.hpp"
#include "phase_manifold/numerics/parallel.hpp"
#include "phase_manifold/numerics/sampler.hpp"

namespace phase_manifold::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string joined(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

manifold::Variant variant_arg(const std::string& text) {
  try {
    return manifold::parse_variant(text);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

json funnel_json(const manifold::ManifoldGrid& grid, const manifold::FunnelReport& report) {
  json points = json::array();
  for (const auto& f : report.funnel_points) {
    points.push_back({{"c", f.c},
                      {"x", f.x},
                      {"value", f.value},
                      {"basin_fraction", f.basin_fraction},
                      {"plateau_nodes", f.plateau_nodes},
                      {"boundary", f.boundary}});
  }
  return {{"alpha", grid.alpha},
          {"variant", manifold::to_string(grid.variant)},
          {"count", report.count},
          {"flat_tol", report.flat_tol},
          {"tie_break_rule", manifold::FunnelReport::tie_break_rule},
          {"failed_nodes", grid.failed_nodes},
          {"funnel_points", points}};
}

json record_json(const algorithms::RunRecord& rec) {
  json x_hat = json::array();
  for (double v : rec.x_hat) x_hat.push_back(v);
  return {{"success", rec.success},
          {"overlap", rec.overlap},
          {"sq_norm", rec.sq_norm},
          {"rounds", rec.hybrid_rounds},
          {"round_overlaps", rec.round_overlaps},
          {"stage_iters", rec.stage_iters},
          {"max_traj_sq_norm", rec.max_traj_sq_norm},
          {"stalled", rec.stalled},
          {"failure", rec.failure},
          {"x_hat", x_hat}};
}

struct CurveArgs {
  std::string variant = "plain";
  double alpha = 0.0;
  double c = 1.0;
  double x_min = 0.0;
  std::optional<double> x_max;  // default sqrt(c)
  int steps = 200;
  std::string out;
};

int theory_curve(const CurveArgs& a, unsigned threads, const std::string& command) {
  const auto variant = variant_arg(a.variant);
  if (!(a.c > 0.0)) throw UsageError("--c must be > 0");
  const double x_max = a.x_max.value_or(std::sqrt(a.c));
  const manifold::AxisRange axis{a.x_min, x_max, a.steps};
  axis.validate("x range");
  if (!(a.alpha > 0.0)) throw UsageError("--alpha must be > 0");
  if (!manifold::node_feasible(variant, a.c, x_max)) {
    throw UsageError("--x-max is infeasible for this --c (need x^2 <= c)");
  }
  ensure_writable(a.out);

  manifold::BoundOptions options;
  options.threads = threads;
  const auto xs = axis.points();
  std::vector<std::vector<double>> rows(xs.size());
  numerics::parallel_for(xs.size(), threads, [&](std::size_t k) {
    const auto pt = rdt::ParamPoint::make(a.c, xs[k]);
    rows[k] = {xs[k], manifold::evaluate_bound(a.alpha, variant, pt, options)};
  });
  write_file(a.out, csv_text({"x", "phi0"}, rows));
  const json config = {{"variant", manifold::to_string(variant)}, {"alpha", a.alpha},
                       {"c", a.c}, {"x_min", a.x_min}, {"x_max", x_max}, {"steps", a.steps}};
  write_manifest(a.out, make_manifest(command, config, 0));
  return kOk;
}

struct ManifoldArgs {
  std::string variant = "plain";
  double alpha = 0.0;
  std::vector<double> c_range{0.05, 1.0};
  std::vector<double> x_range{0.0, 1.0};
  std::vector<int> grid{40};
  double flat_tol = -1.0;
  std::string out_prefix;
};

int theory_manifold(const ManifoldArgs& a, unsigned threads, const std::string& command) {
  const auto variant = variant_arg(a.variant);
  if (!(a.alpha > 0.0)) throw UsageError("--alpha must be > 0");
  const int nc = a.grid.front();
  const int nx = a.grid.back();
  manifold::GridSpec spec;
  spec.c = {a.c_range[0], a.c_range[1], nc};
  spec.x = {a.x_range[0], a.x_range[1], nx};
  spec.c.validate("c range");
  spec.x.validate("x range");
  if (nc < 2 || nx < 2) throw UsageError("--grid needs at least 2 points per axis");
  const fs::path grid_path = a.out_prefix + ".grid.csv";
  const fs::path funnel_path = a.out_prefix + ".funnels.json";
  ensure_writable(grid_path);

  manifold::BoundOptions options;
  options.threads = threads;
  const auto grid = manifold::build_manifold(a.alpha, variant, spec, options);
  const auto report = manifold::detect_funnels(grid, a.flat_tol);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < grid.nc(); ++i) {
    for (std::size_t j = 0; j < grid.nx(); ++j) {
      if (grid.feasible(i, j)) rows.push_back({grid.c_axis[i], grid.x_axis[j], grid.at(i, j)});
    }
  }
  write_file(grid_path, csv_text({"c", "x", "phi0"}, rows));
  write_file(funnel_path, funnel_json(grid, report).dump(2) + "\n");
  const json config = {{"variant", manifold::to_string(variant)}, {"alpha", a.alpha},
                       {"c_range", a.c_range}, {"x_range", a.x_range},
                       {"grid", {nc, nx}}, {"flat_tol", a.flat_tol}};
  write_manifest(a.out_prefix, make_manifest(command, config, 0));
  return kOk;
}

struct CriticalArgs {
  std::string variant = "plain";
  std::string predicate = "c1_curve_monotone";
  std::vector<double> bracket;
  double tol = 1e-3;
  int curve_steps = 200;
  int grid = 40;
  std::string out;
};

int critical(const CriticalArgs& a, unsigned threads, const std::string& command) {
  const auto variant = variant_arg(a.variant);
  manifold::Predicate predicate;
  try {
    predicate = manifold::parse_predicate(a.predicate);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (!(a.bracket[0] < a.bracket[1])) throw UsageError("--bracket must be increasing");
  if (!(a.tol > 0.0)) throw UsageError("--tol must be > 0");
  manifold::CriticalAlphaSpec spec;
  spec.curve_x.steps = a.curve_steps;
  spec.grid.c.steps = a.grid;
  spec.grid.x.steps = a.grid;
  spec.curve_x.validate("curve");
  if (a.grid < 2) throw UsageError("--grid must be >= 2");
  ensure_writable(a.out);

  manifold::BoundOptions options;
  options.threads = threads;
  const double alpha_c = manifold::critical_alpha(variant, predicate, a.bracket[0], a.bracket[1],
                                                  a.tol, spec, options);
  const json result = {{"variant", manifold::to_string(variant)},
                       {"predicate", manifold::to_string(predicate)},
                       {"alpha_critical", alpha_c},
                       {"bracket", a.bracket},
                       {"tol", a.tol}};
  write_file(a.out, result.dump(2) + "\n");
  json config = result;
  config.erase("alpha_critical");
  config["curve_steps"] = a.curve_steps;
  config["grid"] = a.grid;
  write_manifest(a.out, make_manifest(command, config, 0));
  return kOk;
}

int sim_transition(const std::string& config_file, const std::string& out_prefix,
                   unsigned threads, const std::string& command) {
  SweepConfig cfg = load_sweep_config(config_file);
  if (const auto seed = seed_from_environment()) cfg.spec.master_seed = *seed;
  const fs::path trials_path = out_prefix + ".trials.jsonl";
  const fs::path table_path = out_prefix + ".table.csv";
  ensure_writable(trials_path);

  const auto table = experiments::run_sweep(cfg.spec, cfg.algo, threads);

  std::string lines;
  for (const auto& t : table.trials) {
    json row = {{"algorithm", experiments::to_string(t.algorithm)},
                {"alpha", t.alpha},
                {"seed", t.seed},
                {"success", t.record.success},
                {"overlap", t.record.overlap},
                {"sq_norm", t.record.sq_norm},
                {"rounds", t.record.hybrid_rounds}};
    if (!t.record.failure.empty()) row["failure"] = t.record.failure;
    lines += row.dump() + "\n";
  }
  write_file(trials_path, lines);

  std::string csv =
      "algorithm,alpha,trials,successes,success_rate,mean_rounds,mean_final_overlap,"
      "max_traj_sq_norm\n";
  for (const auto& r : table.rows) {
    csv += experiments::to_string(r.algorithm) + ',' + format_double(r.alpha) + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.successes) + ',' +
           format_double(r.success_rate) + ',' + format_double(r.mean_rounds) + ',' +
           format_double(r.mean_final_overlap) + ',' + format_double(r.max_traj_sq_norm) + '\n';
  }
  write_file(table_path, csv);
  write_manifest(out_prefix, make_manifest(command, to_json(cfg), cfg.spec.master_seed));
  return kOk;
}

struct RunArgs {
  int n = 0;
  double alpha = 0.0;
  std::string algorithm = "hybrid";
  std::optional<std::uint64_t> seed;
  std::string config_file;
  std::string out;
};

int sim_run(const RunArgs& a, const std::string& command) {
  if (a.n < 2) throw UsageError("--n must be >= 2");
  if (!(a.alpha > 0.0)) throw UsageError("--alpha must be > 0");
  experiments::Algorithm algorithm;
  try {
    algorithm = experiments::parse_algorithm(a.algorithm);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  algorithms::HybridConfig cfg;
  if (!a.config_file.empty()) {
    const auto doc = [&] {
      try {
        std::ifstream in(a.config_file);
        if (!in) throw UsageError("cannot read config file: " + a.config_file);
        return json::parse(in);
      } catch (const json::parse_error& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
      }
    }();
    cfg = parse_algorithm_config(doc);
  }
  std::uint64_t seed = 1;
  if (const auto env = seed_from_environment()) seed = *env;
  if (a.seed) seed = *a.seed;
  ensure_writable(a.out);

  const std::uint64_t inst_seed = numerics::derive_seed(seed, {0});
  const std::uint64_t rng_seed = numerics::derive_seed(seed, {1});
  const auto inst = experiments::generate_instance(a.n, a.alpha, inst_seed);
  const auto rec = experiments::run_algorithm(algorithm, inst, cfg, rng_seed);

  json doc = record_json(rec);
  doc["algorithm"] = experiments::to_string(algorithm);
  doc["n"] = a.n;
  doc["m"] = inst.m();
  doc["alpha"] = a.alpha;
  doc["seed"] = seed;
  write_file(a.out, doc.dump(2) + "\n");
  json config = to_json(cfg);
  config["n"] = a.n;
  config["alpha"] = a.alpha;
  config["algorithm"] = a.algorithm;
  write_manifest(a.out, make_manifest(command, config, seed));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Landscape bounds and recovery simulations for real phase retrieval"};
  app.name(args.empty() ? "phase_manifold" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: machine parallelism)");

  CurveArgs curve;
  auto* c = app.add_subcommand("theory-curve", "phi0 along x at fixed c, written as CSV");
  c->add_option("--variant", curve.variant, "plain, lifted, plain_sq, lifted_sq or barrier:<t0>");
  c->add_option("--alpha", curve.alpha, "Oversampling ratio m/n")->required();
  c->add_option("--c", curve.c, "Squared norm c");
  c->add_option("--x-min", curve.x_min);
  c->add_option("--x-max", curve.x_max, "Default sqrt(c)");
  c->add_option("--steps", curve.steps, "Number of x samples");
  c->add_option("--out", curve.out, "Output CSV")->required();

  ManifoldArgs mf;
  auto* m = app.add_subcommand("theory-manifold", "phi0 over a (c, x) grid and its funnels");
  m->add_option("--variant", mf.variant);
  m->add_option("--alpha", mf.alpha)->required();
  m->add_option("--c-range", mf.c_range, "lo hi")->expected(2);
  m->add_option("--x-range", mf.x_range, "lo hi")->expected(2);
  m->add_option("--grid", mf.grid, "N or NC NX")->expected(1, 2);
  m->add_option("--flat-tol", mf.flat_tol, "Plateau tolerance (< 0: default rule)");
  m->add_option("--out-prefix", mf.out_prefix)->required();

  CriticalArgs crit;
  auto* k = app.add_subcommand("critical-alpha", "Bisection for the critical oversampling ratio");
  k->add_option("--variant", crit.variant);
  k->add_option("--predicate", crit.predicate, "c1_curve_monotone or single_funnel");
  k->add_option("--bracket", crit.bracket, "lo hi")->expected(2)->required();
  k->add_option("--tol", crit.tol);
  k->add_option("--curve-steps", crit.curve_steps, "x samples of the c = 1 curve");
  k->add_option("--grid", crit.grid, "Grid size for single_funnel");
  k->add_option("--out", crit.out, "Output JSON")->required();

  std::string config_file;
  std::string out_prefix;
  auto* s = app.add_subcommand("sim-transition", "Monte-Carlo success-rate sweep over alpha");
  s->add_option("--config-file", config_file, "JSON sweep config")->required();
  s->add_option("--out-prefix", out_prefix)->required();

  RunArgs run_args;
  auto* r = app.add_subcommand("sim-run", "One recovery run, written as JSON");
  r->add_option("--n", run_args.n)->required();
  r->add_option("--alpha", run_args.alpha)->required();
  r->add_option("--algorithm", run_args.algorithm, "hybrid, gradplain or gradbar");
  r->add_option("--seed", run_args.seed);
  r->add_option("--config-file", run_args.config_file, "JSON algorithm settings");
  r->add_option("--out", run_args.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kUsage;
  }

  const std::string command = joined(args);
  try {
    if (*c) return theory_curve(curve, threads, command);
    if (*m) return theory_manifold(mf, threads, command);
    if (*k) return critical(crit, threads, command);
    if (*s) return sim_transition(config_file, out_prefix, threads, command);
    if (*r) return sim_run(run_args, command);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace phase_manifold::cli
