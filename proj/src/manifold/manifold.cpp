#include "phase_manifold/manifold/manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "phase_manifold/errors.hpp"
#include "phase_manifold/numerics/parallel.hpp"
#include "phase_manifold/rdt/plain.hpp"
#include "phase_manifold/rdt/squared.hpp"

namespace phase_manifold::manifold {

Variant Variant::barrier(double t0) {
  if (!(t0 > 0.0)) throw InvalidArgument("barrier variant: t0 must be > 0");
  return {VariantKind::barrier, t0};
}

std::string to_string(const Variant& variant) {
  switch (variant.kind) {
    case VariantKind::plain:
      return "plain";
    case VariantKind::lifted:
      return "lifted";
    case VariantKind::plain_sq:
      return "plain_sq";
    case VariantKind::lifted_sq:
      return "lifted_sq";
    case VariantKind::barrier: {
      char buffer[64];
      std::snprintf(buffer, sizeof buffer, "barrier:%.17g", variant.t0);
      return buffer;
    }
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "plain") return {VariantKind::plain, 0.0};
  if (text == "lifted") return {VariantKind::lifted, 0.0};
  if (text == "plain_sq") return {VariantKind::plain_sq, 0.0};
  if (text == "lifted_sq") return {VariantKind::lifted_sq, 0.0};
  const std::string prefix = "barrier:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double t0 = 0.0;
    try {
      t0 = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - prefix.size()) {
      throw InvalidArgument("variant: cannot parse t0 in '" + text + "'");
    }
    return Variant::barrier(t0);
  }
  throw InvalidArgument("unknown variant '" + text + "'");
}

std::vector<double> AxisRange::points() const {
  std::vector<double> out(steps);
  for (int k = 0; k < steps; ++k) {
    out[k] = steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1);
  }
  if (steps > 1) out.back() = hi;
  return out;
}

void AxisRange::validate(const char* name) const {
  const std::string label(name);
  if (steps < 1) throw InvalidArgument(label + ": steps must be >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument(label + ": non-finite bound");
  if (lo < 0.0) throw InvalidArgument(label + ": range must be nonnegative");
  if (steps > 1 && !(lo < hi)) throw InvalidArgument(label + ": need lo < hi");
}

bool node_feasible(const Variant& variant, double c, double x) {
  if (!(c > 0.0) || x < 0.0) return false;
  if (c - x * x < -1e-12 * c) return false;
  if (variant.kind == VariantKind::barrier && !(c < 1.0)) return false;
  return true;
}

double evaluate_bound(double alpha, const Variant& variant, const rdt::ParamPoint& pt,
                      const BoundOptions& options) {
  switch (variant.kind) {
    case VariantKind::plain:
      return rdt::phi0_plain(alpha, pt, options.quad).phi0;
    case VariantKind::lifted:
      return rdt::phi0_lifted(alpha, pt, options.quad, options.opt_tol, options.lifted).phi0_bar;
    case VariantKind::plain_sq:
      return rdt::phi0_sq(alpha, pt, options.quad, options.opt_tol);
    case VariantKind::lifted_sq:
      return rdt::phi0_sq_lifted(alpha, pt, options.quad, options.opt_tol, options.lifted)
          .phi0_bar;
    case VariantKind::barrier:
      if (!(pt.c() < 1.0)) throw InvalidArgument("barrier manifold: needs c < 1");
      return variant.t0 * rdt::phi0_plain(alpha, pt, options.quad).phi0 - std::log1p(-pt.c());
  }
  throw InvalidArgument("evaluate_bound: unknown variant");
}

ManifoldGrid build_manifold(double alpha, const Variant& variant, const GridSpec& grid,
                            const BoundOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("build_manifold: alpha must be > 0");
  grid.c.validate("c range");
  grid.x.validate("x range");
  options.quad.validate();
  ManifoldGrid out;
  out.alpha = alpha;
  out.variant = variant;
  out.c_axis = grid.c.points();
  out.x_axis = grid.x.points();
  out.values.assign(out.nc() * out.nx(), std::nullopt);

  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < out.nc(); ++i) {
    for (std::size_t j = 0; j < out.nx(); ++j) {
      if (node_feasible(variant, out.c_axis[i], out.x_axis[j])) nodes.push_back(out.index(i, j));
    }
  }
  if (nodes.empty()) throw InvalidArgument("build_manifold: grid has no feasible node");

  std::atomic<std::size_t> failed{0};
  numerics::parallel_for(nodes.size(), options.threads, [&](std::size_t k) {
    const std::size_t idx = nodes[k];
    const double c = out.c_axis[idx / out.nx()];
    const double x = out.x_axis[idx % out.nx()];
    try {
      const double v = evaluate_bound(alpha, variant, rdt::ParamPoint::make(c, x), options);
      if (std::isfinite(v)) {
        out.values[idx] = v;
      } else {
        ++failed;
      }
    } catch (const NumericalError&) {
      ++failed;
    }
  });
  out.failed_nodes = failed.load();
  if (out.failed_nodes * 100 > nodes.size()) {
    throw NonConvergence("build_manifold: " + std::to_string(out.failed_nodes) + " of " +
                         std::to_string(nodes.size()) + " nodes failed");
  }
  return out;
}

ManifoldGrid barrier_manifold(double alpha, double t0, const GridSpec& grid,
                              const BoundOptions& options) {
  return build_manifold(alpha, Variant::barrier(t0), grid, options);
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

FunnelReport detect_funnels(const ManifoldGrid& grid, double flat_tol) {
  const std::size_t nc = grid.nc();
  const std::size_t nx = grid.nx();
  const std::size_t total = nc * nx;
  if (grid.values.size() != total) throw DimensionMismatch("detect_funnels: value count mismatch");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t feasible = 0;
  for (const auto& v : grid.values) {
    if (!v) continue;
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
    ++feasible;
  }
  if (feasible == 0) throw InvalidArgument("detect_funnels: grid has no feasible node");
  if (flat_tol < 0.0) flat_tol = 1e-9 * (hi - lo);

  FunnelReport report;
  report.flat_tol = flat_tol;
  report.flow_edges.assign(total, -1);
  report.basin.assign(total, -1);

  // Neighbour preference: lower value first; within flat_tol of the lowest,
  // larger x then larger c.
  auto preferred = [&](std::size_t a, std::size_t b, double va, double vb) {
    if (std::abs(va - vb) > flat_tol) return va < vb;
    const std::size_t ja = a % nx, jb = b % nx;
    if (ja != jb) return ja > jb;
    return a / nx > b / nx;
  };

  // 8-neighbourhood, plus links along the upper edge of the feasible region.
  // x <= sqrt(c) has a curved edge that the lattice approximates by a
  // staircase; an 8-connected path cannot follow it, which strands nodes the
  // continuous flow would carry along the edge. Each row's topmost node is
  // linked to the topmost nodes of its own stair step and of the neighbouring
  // step on either side.
  std::vector<long> top(nc, -1);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      if (grid.values[grid.index(i, j)]) top[i] = static_cast<long>(j);
    }
  }
  std::vector<std::vector<std::size_t>> neighbours(total);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t idx = grid.index(i, j);
      if (!grid.values[idx]) continue;
      auto& list = neighbours[idx];
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const long ni = static_cast<long>(i) + di;
          const long nj = static_cast<long>(j) + dj;
          if ((di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= static_cast<long>(nc) ||
              nj >= static_cast<long>(nx)) {
            continue;
          }
          const std::size_t nidx = grid.index(ni, nj);
          if (grid.values[nidx]) list.push_back(nidx);
        }
      }
      if (top[i] != static_cast<long>(j)) continue;
      auto link = [&](long ni) {
        const std::size_t nidx = grid.index(ni, top[ni]);
        if (std::find(list.begin(), list.end(), nidx) == list.end()) list.push_back(nidx);
      };
      for (int dir : {-1, 1}) {
        long step_top = -1;
        for (long ni = static_cast<long>(i) + dir; ni >= 0 && ni < static_cast<long>(nc);
             ni += dir) {
          if (top[ni] < 0) break;
          if (top[ni] != top[i]) {
            if (step_top >= 0 && top[ni] != step_top) break;
            step_top = top[ni];
          }
          link(ni);
        }
      }
    }
  }

  std::vector<char> is_sink(total, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!grid.values[idx]) continue;
    const double here = *grid.values[idx];
    long best = -1;
    double best_value = 0.0;
    for (std::size_t nidx : neighbours[idx]) {
      const double nv = *grid.values[nidx];
      if (best < 0 || preferred(nidx, best, nv, best_value)) {
        best = static_cast<long>(nidx);
        best_value = nv;
      }
    }
    if (best >= 0 && best_value < here - flat_tol) {
      report.flow_edges[idx] = best;
    } else {
      is_sink[idx] = 1;
    }
  }

  // Neighbouring sinks on a common plateau form one funnel.
  DisjointSets sets(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!is_sink[idx]) continue;
    for (std::size_t nidx : neighbours[idx]) {
      if (is_sink[nidx] && std::abs(*grid.values[idx] - *grid.values[nidx]) <= flat_tol) {
        sets.unite(idx, nidx);
      }
    }
  }

  // Funnel ids in order of first appearance of each plateau root.
  std::vector<int> root_id(total, -1);
  std::vector<std::size_t> representative;
  std::vector<std::size_t> plateau_size;
  std::vector<char> on_edge;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!is_sink[idx]) continue;
    const std::size_t root = sets.find(idx);
    if (root_id[root] < 0) {
      root_id[root] = static_cast<int>(representative.size());
      representative.push_back(idx);
      plateau_size.push_back(0);
      on_edge.push_back(0);
    }
    const int id = root_id[root];
    ++plateau_size[id];
    const std::size_t i = idx / nx, j = idx % nx;
    if (i == 0 || j == 0 || i + 1 == nc || j + 1 == nx) on_edge[id] = 1;
    const std::size_t rep = representative[id];
    if (preferred(idx, rep, *grid.values[idx], *grid.values[rep])) representative[id] = idx;
  }

  std::vector<std::size_t> basin_count(representative.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!grid.values[idx]) continue;
    std::size_t cur = idx;
    while (report.flow_edges[cur] >= 0) cur = static_cast<std::size_t>(report.flow_edges[cur]);
    const int id = root_id[sets.find(cur)];
    report.basin[idx] = id;
    ++basin_count[id];
  }

  for (std::size_t id = 0; id < representative.size(); ++id) {
    const std::size_t rep = representative[id];
    report.funnel_points.push_back({grid.c_axis[rep / nx], grid.x_axis[rep % nx],
                                    *grid.values[rep],
                                    static_cast<double>(basin_count[id]) / feasible,
                                    plateau_size[id], on_edge[id] != 0});
  }
  report.count = report.funnel_points.size();
  return report;
}

bool curve_monotone(const std::vector<double>& values, double tol) {
  const std::size_t n = values.size();
  if (n < 3) return true;
  std::vector<double> right_min(n);
  right_min[n - 1] = values[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) right_min[k] = std::min(values[k], right_min[k + 1]);
  double left_min = values[0];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (values[k] - left_min > tol && values[k] - right_min[k + 1] > tol) return false;
    left_min = std::min(left_min, values[k]);
  }
  return true;
}

double default_curve_tol(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return 1e-9 * (*hi - *lo);
}

std::string to_string(Predicate predicate) {
  return predicate == Predicate::single_funnel ? "single_funnel" : "c1_curve_monotone";
}

Predicate parse_predicate(const std::string& text) {
  if (text == "single_funnel") return Predicate::single_funnel;
  if (text == "c1_curve_monotone") return Predicate::c1_curve_monotone;
  throw InvalidArgument("unknown predicate '" + text + "'");
}

struct CurveEvaluator::Impl {
  Variant variant;
  BoundOptions options;
  std::vector<double> xs;
  std::vector<rdt::ParamPoint> points;
  std::vector<double> f_q;                  // plain and barrier
  std::vector<rdt::LiftProfile> profiles;  // lifted
};

CurveEvaluator::CurveEvaluator(const Variant& variant, const AxisRange& x_axis,
                               const BoundOptions& options)
    : impl_(std::make_unique<Impl>()) {
  x_axis.validate("curve x range");
  if (x_axis.hi > 1.0 + 1e-12) throw InvalidArgument("curve x range: x must be <= 1 at c = 1");
  if (variant.kind == VariantKind::barrier) {
    throw InvalidArgument("c = 1 slice is undefined for the barrier variant");
  }
  impl_->variant = variant;
  impl_->options = options;
  impl_->xs = x_axis.points();
  for (double x : impl_->xs) impl_->points.push_back(rdt::ParamPoint::make(1.0, std::min(x, 1.0)));
  const std::size_t n = impl_->points.size();
  if (variant.kind == VariantKind::plain) {
    impl_->f_q.resize(n);
    numerics::parallel_for(n, options.threads, [&](std::size_t k) {
      impl_->f_q[k] = rdt::f_q_closed(impl_->points[k], options.quad);
    });
  } else if (variant.kind == VariantKind::lifted && !options.lifted.exact_profile) {
    std::vector<std::optional<rdt::LiftProfile>> built(n);
    numerics::parallel_for(n, options.threads, [&](std::size_t k) {
      built[k].emplace(impl_->points[k], options.quad);
    });
    for (auto& p : built) impl_->profiles.push_back(std::move(*p));
  }
}

CurveEvaluator::~CurveEvaluator() = default;
CurveEvaluator::CurveEvaluator(CurveEvaluator&&) noexcept = default;
CurveEvaluator& CurveEvaluator::operator=(CurveEvaluator&&) noexcept = default;

const std::vector<double>& CurveEvaluator::x_points() const { return impl_->xs; }

std::vector<double> CurveEvaluator::evaluate(double alpha) const {
  if (!(alpha > 0.0)) throw InvalidArgument("curve: alpha must be > 0");
  const Impl& s = *impl_;
  std::vector<double> out(s.points.size());
  numerics::parallel_for(out.size(), s.options.threads, [&](std::size_t k) {
    const rdt::ParamPoint& pt = s.points[k];
    if (!s.f_q.empty()) {
      const double gap = std::max(std::sqrt(alpha * s.f_q[k]) - pt.r(), 0.0);
      out[k] = gap * gap;
    } else if (!s.profiles.empty()) {
      out[k] = rdt::phi0_lifted(alpha, pt, s.profiles[k], s.options.opt_tol, s.options.lifted)
                   .phi0_bar;
    } else {
      out[k] = evaluate_bound(alpha, s.variant, pt, s.options);
    }
  });
  return out;
}

double critical_alpha(const Variant& variant, Predicate predicate, double alpha_lo,
                      double alpha_hi, double alpha_tol, const CriticalAlphaSpec& spec,
                      const BoundOptions& options) {
  if (!(alpha_lo > 0.0) || !(alpha_lo < alpha_hi)) {
    throw BadBracket("critical_alpha: need 0 < alpha_lo < alpha_hi");
  }
  if (!(alpha_tol > 0.0)) throw InvalidArgument("critical_alpha: alpha_tol must be > 0");

  std::optional<CurveEvaluator> curve;
  if (predicate == Predicate::c1_curve_monotone) curve.emplace(variant, spec.curve_x, options);

  auto holds = [&](double alpha) {
    if (predicate == Predicate::single_funnel) {
      const auto grid = build_manifold(alpha, variant, spec.grid, options);
      return detect_funnels(grid, spec.flat_tol).count == 1;
    }
    const auto values = curve->evaluate(alpha);
    const double tol = spec.flat_tol < 0.0 ? default_curve_tol(values) : spec.flat_tol;
    return curve_monotone(values, tol);
  };

  if (holds(alpha_lo)) throw BadBracket("critical_alpha: predicate already holds at alpha_lo");
  if (!holds(alpha_hi)) throw BadBracket("critical_alpha: predicate fails at alpha_hi");
  double lo = alpha_lo;
  double hi = alpha_hi;
  while (hi - lo > alpha_tol) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace phase_manifold::manifold
