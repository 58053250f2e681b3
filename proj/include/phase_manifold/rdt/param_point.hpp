#pragma once

namespace phase_manifold::rdt {

// A feasible (c, x) pair: c = ||x||^2 of the candidate, x = overlap with the
// planted unit-norm signal, r = sqrt(c - x^2) the orthogonal component.
class ParamPoint {
 public:
  // Throws InvalidArgument unless c > 0, x >= 0 and x^2 <= c (up to a relative
  // 1e-12 slack, which is snapped to r = 0).
  static ParamPoint make(double c, double x);

  double c() const { return c_; }
  double x() const { return x_; }
  double r() const { return r_; }

 private:
  ParamPoint(double c, double x, double r) : c_(c), x_(x), r_(r) {}
  double c_;
  double x_;
  double r_;
};

}  // namespace phase_manifold::rdt
