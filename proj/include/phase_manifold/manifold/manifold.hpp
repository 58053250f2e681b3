#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phase_manifold/numerics/quadrature.hpp"
#include "phase_manifold/rdt/lifted.hpp"
#include "phase_manifold/rdt/param_point.hpp"

namespace phase_manifold::manifold {

enum class VariantKind { plain, lifted, plain_sq, lifted_sq, barrier };

// Which bound the manifold shows. barrier wraps the plain bound as
// t0 * phi0 - log(1 - c) and is only defined for c < 1.
struct Variant {
  VariantKind kind = VariantKind::plain;
  double t0 = 0.0;

  static Variant barrier(double t0);
};

std::string to_string(const Variant& variant);
// Accepts plain, lifted, plain_sq, lifted_sq and barrier:<t0>.
Variant parse_variant(const std::string& text);

// Closed interval sampled at `steps` evenly spaced points (steps = 1 gives lo).
struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
  int steps = 2;

  std::vector<double> points() const;
  void validate(const char* name) const;
};

struct GridSpec {
  AxisRange c{0.05, 1.0, 40};
  AxisRange x{0.0, 1.0, 40};
};

struct BoundOptions {
  numerics::QuadratureSpec quad;
  double opt_tol = 1e-7;
  rdt::LiftedOptions lifted;
  unsigned threads = 0;  // 0: machine parallelism
};

// Bound value at one feasible point.
double evaluate_bound(double alpha, const Variant& variant, const rdt::ParamPoint& pt,
                      const BoundOptions& options);

// Rectangular (c, x) lattice; values are stored c-major (index i * nx + j).
struct ManifoldGrid {
  double alpha = 0.0;
  Variant variant;
  std::vector<double> c_axis;
  std::vector<double> x_axis;
  std::vector<std::optional<double>> values;  // nullopt: infeasible or failed node
  std::size_t failed_nodes = 0;

  std::size_t nc() const { return c_axis.size(); }
  std::size_t nx() const { return x_axis.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nx() + j; }
  bool feasible(std::size_t i, std::size_t j) const { return values[index(i, j)].has_value(); }
  double at(std::size_t i, std::size_t j) const { return *values[index(i, j)]; }
};

// True when x^2 <= c up to the ParamPoint slack (and c < 1 for barrier).
bool node_feasible(const Variant& variant, double c, double x);

// Evaluates the bound at every feasible node in parallel. A node whose
// evaluation throws a NumericalError is marked absent and counted; more than
// 1% failed nodes raises NonConvergence.
ManifoldGrid build_manifold(double alpha, const Variant& variant, const GridSpec& grid,
                            const BoundOptions& options);

ManifoldGrid barrier_manifold(double alpha, double t0, const GridSpec& grid,
                              const BoundOptions& options);

struct FunnelPoint {
  double c;
  double x;
  double value;
  double basin_fraction;
  std::size_t plateau_nodes;
  bool boundary;  // some plateau node lies on the edge of the grid
};

struct FunnelReport {
  std::vector<FunnelPoint> funnel_points;
  std::size_t count = 0;
  // Descent successor per node (grid index), -1 for sinks and absent nodes.
  std::vector<long> flow_edges;
  // Funnel id per node, -1 for absent nodes.
  std::vector<int> basin;
  double flat_tol = 0.0;
  static constexpr const char* tie_break_rule =
      "8-neighbour steepest descent; ties toward larger x, then larger c";
};

// Discrete steepest-descent flow. flat_tol < 0 selects the default
// 1e-9 * (max - min) over the feasible nodes.
FunnelReport detect_funnels(const ManifoldGrid& grid, double flat_tol = -1.0);

// True when the sampled curve has no interior point k that rises more than
// tol above the running minimum on both sides, i.e. no strict interior local
// maximum of prominence > tol.
bool curve_monotone(const std::vector<double>& values, double tol);

enum class Predicate { single_funnel, c1_curve_monotone };

std::string to_string(Predicate predicate);
Predicate parse_predicate(const std::string& text);

struct CriticalAlphaSpec {
  GridSpec grid;                  // used by single_funnel
  AxisRange curve_x{0.0, 1.0, 200};  // x samples of the c = 1 slice
  double flat_tol = -1.0;         // < 0: default rule of detect_funnels
};

// phi(1, x) sampled on spec.curve_x. Per-point data that does not depend on
// alpha (plain f_q, lifted profiles) is computed once per evaluator.
class CurveEvaluator {
 public:
  CurveEvaluator(const Variant& variant, const AxisRange& x_axis, const BoundOptions& options);
  ~CurveEvaluator();
  CurveEvaluator(CurveEvaluator&&) noexcept;
  CurveEvaluator& operator=(CurveEvaluator&&) noexcept;

  std::vector<double> evaluate(double alpha) const;
  const std::vector<double>& x_points() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Default tolerance for the c1_curve_monotone predicate: 1e-9 * (max - min).
double default_curve_tol(const std::vector<double>& values);

// Bisection on alpha for the predicate switching from false (alpha_lo) to
// true (alpha_hi); returns the midpoint of the final bracket of width
// <= alpha_tol. Throws BadBracket if the endpoints do not straddle.
double critical_alpha(const Variant& variant, Predicate predicate, double alpha_lo,
                      double alpha_hi, double alpha_tol, const CriticalAlphaSpec& spec,
                      const BoundOptions& options);

}  // namespace phase_manifold::manifold
