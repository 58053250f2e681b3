// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any
// selected criterion fails. Tolerances and runtime limits are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "phase_manifold/algorithms/algorithms.hpp"
#include "phase_manifold/experiments/experiments.hpp"
#include "phase_manifold/manifold/manifold.hpp"
#include "phase_manifold/numerics/parallel.hpp"
#include "phase_manifold/rdt/plain.hpp"
#include "phase_manifold/rdt/squared.hpp"

namespace fs = std::filesystem;
using namespace phase_manifold;
using algorithms::VectorXd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Scratch directory for criteria that go through the command-line tool.
struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("pm_accept_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int tool(std::vector<std::string> args) {
  args.insert(args.begin(), "phase_manifold");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "  tool exit %d: %s", code, err.str().c_str());
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome oracle_plain_fq() {
  constexpr std::uint64_t kSamples = 100'000'000;
  constexpr double kRelFloor = 1e-3;
  constexpr double kStderrMultiple = 3.0;
  struct Node {
    double c, x, r;
    double sum = 0.0, sum_sq = 0.0;
  };
  std::vector<Node> nodes;
  for (double c : {0.25, 0.5, 0.75, 1.0, 1.25}) {
    for (int j = 0; j < 5; ++j) {
      const double x = std::sqrt(c) * j / 5.0;
      nodes.push_back({c, x, std::sqrt(c - x * x)});
    }
  }
  // One normal stream shared by every node; partial sums per block keep the
  // accumulation error far below the tolerance.
  std::mt19937_64 eng(20241018);
  std::normal_distribution<double> normal;
  constexpr std::uint64_t kBlock = 1 << 16;
  std::vector<double> bs(nodes.size()), bq(nodes.size());
  for (std::uint64_t done = 0; done < kSamples;) {
    const std::uint64_t len = std::min(kBlock, kSamples - done);
    std::fill(bs.begin(), bs.end(), 0.0);
    std::fill(bq.begin(), bq.end(), 0.0);
    for (std::uint64_t k = 0; k < len; ++k) {
      const double g0 = normal(eng);
      const double g1 = normal(eng);
      const double a0 = std::abs(g0);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = a0 - std::abs(g0 * nodes[i].x + g1 * nodes[i].r);
        const double v = d * d;
        bs[i] += v;
        bq[i] += v * v;
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i].sum += bs[i];
      nodes[i].sum_sq += bq[i];
    }
    done += len;
  }
  double worst_ratio = 0.0;
  double worst_rel = 0.0;
  for (const auto& nd : nodes) {
    const double n = static_cast<double>(kSamples);
    const double mean = nd.sum / n;
    const double var = std::max(nd.sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double got =
        rdt::f_q_closed(rdt::ParamPoint::make(nd.c, nd.x), numerics::QuadratureSpec{});
    const double rel = std::abs(got - mean) / mean;
    const double allowed = std::max(kStderrMultiple * se / mean, kRelFloor);
    worst_ratio = std::max(worst_ratio, rel / allowed);
    worst_rel = std::max(worst_rel, rel);
  }
  return {worst_ratio <= 1.0, "25 nodes, max rel err " + fmt("%.3g", worst_rel) +
                                  ", max err/allowed " + fmt("%.3g", worst_ratio)};
}

Outcome critical_alpha_cli(const std::string& variant, double lo, double hi, double tol,
                           double expected, double band) {
  Scratch dir;
  const auto out = dir / "crit.json";
  if (tool({"critical-alpha", "--variant", variant, "--predicate", "c1_curve_monotone",
            "--bracket", std::to_string(lo), std::to_string(hi), "--tol", fmt("%.17g", tol),
            "--curve-steps", "200", "--out", out}) != 0) {
    return {false, "critical-alpha failed"};
  }
  const double a = nlohmann::json::parse(slurp(out))["alpha_critical"].get<double>();
  return {std::abs(a - expected) <= band,
          "alpha_c = " + fmt("%.6f", a) + " (target " + fmt("%.4f", expected) + " +- " +
              fmt("%.3g", band) + ")"};
}

bool near_node(const manifold::FunnelPoint& f, double c, double x, double dc, double dx) {
  return std::abs(f.c - c) <= 2.0 * dc + 1e-12 && std::abs(f.x - x) <= 2.0 * dx + 1e-12;
}

std::string describe(const manifold::FunnelReport& r) {
  std::string s = std::to_string(r.count) + " funnel(s)";
  for (const auto& f : r.funnel_points) {
    s += " (" + fmt("%.3f", f.c) + "," + fmt("%.3f", f.x) + ")";
  }
  return s;
}

Outcome plain_funnels() {
  manifold::GridSpec grid;
  grid.c.steps = 80;
  grid.x.steps = 80;
  const double dc = (grid.c.hi - grid.c.lo) / 79.0;
  const double dx = (grid.x.hi - grid.x.lo) / 79.0;
  const manifold::BoundOptions options;
  const auto below = manifold::detect_funnels(manifold::build_manifold(1.5, {}, grid, options));
  const auto above = manifold::detect_funnels(manifold::build_manifold(2.3, {}, grid, options));
  bool ok = below.count == 2 && above.count == 1;
  if (below.count == 2) {
    const auto& a = below.funnel_points[0];
    const auto& b = below.funnel_points[1];
    ok = ok && ((near_node(a, 1, 0, dc, dx) && near_node(b, 1, 1, dc, dx)) ||
                (near_node(a, 1, 1, dc, dx) && near_node(b, 1, 0, dc, dx)));
  }
  return {ok, "alpha 1.5: " + describe(below) + "; alpha 2.3: " + describe(above)};
}

Outcome lifted_single_funnel() {
  manifold::GridSpec grid;  // 40 x 40, c in [0.05, 1]
  const auto report = manifold::detect_funnels(manifold::build_manifold(
      1.4, manifold::parse_variant("lifted"), grid, manifold::BoundOptions{}));
  const double dc = (grid.c.hi - grid.c.lo) / (grid.c.steps - 1);
  const double dx = (grid.x.hi - grid.x.lo) / (grid.x.steps - 1);
  const bool ok = report.count == 1 && near_node(report.funnel_points[0], 1, 1, dc, dx);
  return {ok, "alpha 1.4: " + describe(report)};
}

Outcome squared_lifted_flatness() {
  constexpr double kBump = 1e-3;
  std::vector<double> curve(21);
  numerics::parallel_for(curve.size(), 0, [&](std::size_t k) {
    const auto pt = rdt::ParamPoint::make(1.0, 0.05 * static_cast<double>(k));
    const double v = rdt::phi0_sq_lifted(1.4, pt, numerics::QuadratureSpec{}, 1e-7).phi0_bar;
    curve[k] = std::sqrt(std::max(v, 0.0));
  });
  const double bump = oracles::largest_interior_bump(curve);
  return {bump <= kBump, "largest interior rise " + fmt("%.3g", bump) + " (limit 1e-3)"};
}

Outcome gradient_check() {
  constexpr double kRel = 1e-4;
  constexpr double kStep = 1e-5;
  const auto inst = experiments::generate_instance(10, 2.5, 77);  // m = 25
  std::mt19937_64 eng(78);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.05, 0.95);
  std::uniform_real_distribution<double> log_t(std::log(1e-3), std::log(1e2));
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    VectorXd x(10);
    for (auto& v : x) v = normal(eng);
    x *= radius(eng) / x.norm();
    const double t0 = std::exp(log_t(eng));
    const VectorXd fd_p = oracles::finite_difference(
        [&](const VectorXd& v) { return algorithms::f_plain(inst, v); }, x, kStep);
    const VectorXd fd_b = oracles::finite_difference(
        [&](const VectorXd& v) { return algorithms::f_bar(inst, t0, v); }, x, kStep);
    worst = std::max(worst, (algorithms::grad_f_plain(inst, x) - fd_p).norm() / fd_p.norm());
    worst = std::max(worst, (algorithms::grad_f_bar(inst, t0, x) - fd_b).norm() / fd_b.norm());
  }
  return {worst <= kRel, "50 points, worst relative gap " + fmt("%.3g", worst)};
}

Outcome cubic_oracle() {
  constexpr double kTol = 1e-8;
  constexpr double kScanStep = 1e-5;
  std::mt19937_64 eng(1009);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_ry(std::log(1e-2), std::log(1e2));
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double g0 = normal(eng);
    const double v = normal(eng);
    const double r_y = std::exp(log_ry(eng));
    // The minimizer lies in [0, max(|g0|, |v|)].
    const double hi = std::max(std::abs(g0), std::abs(v)) + kScanStep;
    const double scan = oracles::dense_scan_inner(g0, v, r_y, hi, kScanStep);
    worst = std::max(worst, std::abs(rdt::inner_min_sq(g0, v, r_y).value - scan));
  }
  return {worst <= kTol, "1000 triples, worst gap " + fmt("%.3g", worst)};
}

Outcome hybrid_recovery() {
  constexpr double kRate = 0.9;
  experiments::SweepSpec spec;
  spec.n = 100;
  spec.alpha_values = {2.5};
  spec.trials_per_alpha = 20;
  spec.algorithms = {experiments::Algorithm::hybrid};
  spec.success_tol = 1e-3;
  const auto table = experiments::run_sweep(spec, algorithms::HybridConfig{});
  const auto& row = table.rows.at(0);
  return {row.success_rate >= kRate, std::to_string(row.successes) + "/20 succeeded, rate " +
                                         fmt("%.2f", row.success_rate) + " (need >= 0.9)"};
}

Outcome gradplain_excursion() {
  experiments::SweepSpec spec;
  spec.n = 300;
  spec.alpha_values = {2.3};
  spec.trials_per_alpha = 5;
  spec.algorithms = {experiments::Algorithm::gradplain};
  const auto table = experiments::run_sweep(spec, algorithms::HybridConfig{});
  int inside = 0;
  std::string norms;
  for (const auto& t : table.trials) {
    const double m = t.record.max_traj_sq_norm;
    if (m >= 1.2 && m <= 1.6) ++inside;
    norms += " " + fmt("%.4f", m);
  }
  return {inside >= 3, std::to_string(inside) + "/5 in [1.2, 1.6]; max |x|^2:" + norms};
}

Outcome determinism() {
  Scratch dir;
  {
    std::ofstream(dir / "sweep.json") << R"({"n": 20, "alpha_values": [2.0, 4.0],
      "trials_per_alpha": 2, "algorithms": ["hybrid", "gradplain", "gradbar"],
      "master_seed": 11, "max_rounds": 2, "barrier": {"t0_max": 10.0}})";
  }
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> commands = {
      {{"theory-curve", "--variant", "lifted", "--alpha", "1.4", "--steps", "11", "--out",
        "@curve.csv"},
       {"curve.csv"}},
      {{"theory-manifold", "--alpha", "1.5", "--grid", "20", "--out-prefix", "@mf"},
       {"mf.grid.csv", "mf.funnels.json"}},
      {{"critical-alpha", "--bracket", "1.2", "2.5", "--tol", "0.01", "--out", "@crit.json"},
       {"crit.json"}},
      {{"sim-run", "--n", "30", "--alpha", "3", "--algorithm", "hybrid", "--seed", "5", "--out",
        "@run.json"},
       {"run.json"}},
      {{"sim-transition", "--config-file", dir / "sweep.json", "--out-prefix", "@sw"},
       {"sw.trials.jsonl", "sw.table.csv"}},
  };
  int identical = 0;
  int files = 0;
  for (const auto& [args, outputs] : commands) {
    std::vector<std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> a;
      // '@name' marks an output path, renamed per repetition.
      for (const auto& s : args) {
        a.push_back(s[0] == '@' ? dir / (std::to_string(rep) + s.substr(1)) : s);
      }
      if (tool(a) != 0) return {false, "command " + args[0] + " failed"};
    }
    for (const auto& f : outputs) {
      ++files;
      if (slurp(dir / ("0" + f)) == slurp(dir / ("1" + f))) ++identical;
    }
  }
  return {identical == files,
          std::to_string(identical) + "/" + std::to_string(files) + " data files byte-identical"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("criteria", only, "Criterion numbers to run (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "plain f_q vs 1e8-sample Monte Carlo", 300, oracle_plain_fq},
      {2, "plain critical alpha 1.7932 +- 0.005", 120,
       [] { return critical_alpha_cli("plain", 1.2, 2.5, 1e-3, 1.7932, 0.005); }},
      {3, "lifted critical alpha 1.40 +- 0.02", 1800,
       [] { return critical_alpha_cli("lifted", 1.1, 2.0, 1e-2, 1.40, 0.02); }},
      {4, "plain funnels on 80x80: 2 at 1.5, 1 at 2.3", 600, plain_funnels},
      {5, "lifted 40x40 at alpha 1.4: one funnel at (1,1)", 7200, lifted_single_funnel},
      {6, "squared-lifted c = 1 curve flat at alpha 1.4", 3600, squared_lifted_flatness},
      {7, "gradients vs central differences", 60, gradient_check},
      {8, "inner_min_sq vs dense scan", 60, cubic_oracle},
      {9, "hybrid n=100 alpha=2.5 success rate >= 0.9", 1200, hybrid_recovery},
      {10, "gradplain n=300 alpha=2.3 norm excursion", 1800, gradplain_excursion},
      {11, "byte-identical reruns", 600, determinism},
  };
  const std::set<int> selected(only.begin(), only.end());

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s | %s | %s | %.1fs (limit %.0fs)%s\n", c.id,
                pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs, c.limit_s,
                in_time ? "" : " over time");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
