#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "dcool/errors.hpp"
#include "dcool/problem.hpp"
#include "dcool/vec.hpp"

namespace dcool {

struct ValueGrad {
  double value;
  Vec gradient;
};

struct ValueDeriv {
  double value;
  double derivative;
};

// Squared range misfit (||u|| - d)^2. Nonconvex in u; everything below exists
// to replace it, term by term, with a convex upper bound that touches it at
// the current iterate.
inline double phi(double d, const Vec& u) {
  const double t = u.norm() - d;
  return t * t;
}

// Euclidean projection onto the closed ball of radius d about the origin.
inline Vec ball_project(double d, const Vec& u) {
  const double n = u.norm();
  if (n <= d) return u;
  return (d / n) * u;
}

// Convex part of the majorizer: squared distance to the d-ball,
// (||u|| - d)_+^2, with gradient 2 (u - proj(u)). Differentiable everywhere,
// including across the sphere ||u|| = d.
inline ValueGrad g_plus(double d, const Vec& u) {
  Vec proj = ball_project(d, u);
  Vec diff = u - proj;
  return {diff.squaredNorm(), 2.0 * diff};
}

// Huber function with threshold R: quadratic inside, affine outside, C^1 at
// the seam. Exact branch comparisons; at |r| == R both branches agree in
// value and derivative.
inline ValueDeriv huber(double R, double r) {
  if (std::abs(r) < R) return {r * r, 2.0 * r};
  const double s = (r >= 0.0) ? 1.0 : -1.0;
  return {2.0 * R * std::abs(r) - R * R, 2.0 * R * s};
}

// A distance-term majorizer frozen at a direction v. Only v / ||v|| matters;
// when ||v|| is numerically zero the majorizer degrades to the quadratic
// ||u||^2 + d^2 (still a tight convex upper bound at v = 0). Edges with
// d == 0 also collapse to a plain quadratic, ||u||^2.
class EdgeMajorizer {
 public:
  static EdgeMajorizer from_direction(double d, const Vec& v, double degeneracy_eps) {
    EdgeMajorizer m;
    m.d_ = d;
    const double n = v.norm();
    if (n <= degeneracy_eps) {
      m.degenerate_ = true;
      m.v_hat_ = zero_vec(static_cast<int>(v.size()));
    } else {
      m.degenerate_ = false;
      m.v_hat_ = v / n;
    }
    return m;
  }

  double d() const { return d_; }
  bool degenerate() const { return degenerate_; }
  const Vec& v_hat() const { return v_hat_; }
  int dim() const { return static_cast<int>(v_hat_.size()); }

 private:
  double d_ = 0.0;
  bool degenerate_ = true;
  Vec v_hat_;
};

// Convex majorizer value at u. Nondegenerate case is the pointwise max of the
// ball-distance term and the Huber term along the frozen direction.
inline double big_phi(const EdgeMajorizer& m, const Vec& u) {
  if (u.size() != m.dim()) throw DimensionMismatch("big_phi: u has wrong dimension");
  const double d = m.d();
  if (m.degenerate()) return u.squaredNorm() + d * d;
  if (d == 0.0) return u.squaredNorm();
  const double g = g_plus(d, u).value;
  const double h = huber(d, m.v_hat().dot(u) - d).value;
  return std::max(g, h);
}

// Baseline quadratic majorizer ||u||^2 + d^2 - 2 d v_hat.u. Undefined at
// v = 0, hence the throw; this is the reason the baseline MM update needs a
// special case that the tighter majorizer above avoids.
inline double quadratic_major(const EdgeMajorizer& m, const Vec& u) {
  if (u.size() != m.dim()) throw DimensionMismatch("quadratic_major: u has wrong dimension");
  if (m.degenerate())
    throw DegenerateDirection("quadratic_major: direction v is numerically zero");
  const double d = m.d();
  return u.squaredNorm() + d * d - 2.0 * d * m.v_hat().dot(u);
}

namespace detail {
inline void check_positions(const NetworkProblem& pb, std::span<const Vec> x,
                            const char* where) {
  if (static_cast<int>(x.size()) != pb.n_sensors)
    throw DimensionMismatch(std::string(where) + ": expected " + std::to_string(pb.n_sensors) +
                            " sensor positions, got " + std::to_string(x.size()));
  for (const Vec& xi : x) {
    if (xi.size() != pb.p)
      throw DimensionMismatch(std::string(where) + ": position has wrong ambient dimension");
  }
}
}  // namespace detail

// Global nonconvex cost: squared range misfits over sensor-sensor edges and
// sensor-anchor links. x is indexed by sensor id minus one.
inline double global_cost(const NetworkProblem& pb, std::span<const Vec> x) {
  detail::check_positions(pb, x, "global_cost");
  double f = 0.0;
  for (const Edge& e : pb.edges) f += phi(e.d, x[e.i - 1] - x[e.j - 1]);
  for (const AnchorLink& l : pb.anchor_links)
    f += phi(l.r, x[l.sensor - 1] - pb.anchors[l.anchor - 1]);
  return f;
}

// Convex surrogate of the global cost, anchored at positions x_bar: each term
// is majorized along the direction the corresponding difference had at x_bar.
// Tight at x == x_bar.
inline double surrogate_cost(const NetworkProblem& pb, std::span<const Vec> x,
                             std::span<const Vec> x_bar, double degeneracy_eps = 1e-12) {
  detail::check_positions(pb, x, "surrogate_cost");
  detail::check_positions(pb, x_bar, "surrogate_cost");
  double F = 0.0;
  for (const Edge& e : pb.edges) {
    const EdgeMajorizer m =
        EdgeMajorizer::from_direction(e.d, x_bar[e.i - 1] - x_bar[e.j - 1], degeneracy_eps);
    F += big_phi(m, x[e.i - 1] - x[e.j - 1]);
  }
  for (const AnchorLink& l : pb.anchor_links) {
    const Vec& a = pb.anchors[l.anchor - 1];
    const EdgeMajorizer m =
        EdgeMajorizer::from_direction(l.r, x_bar[l.sensor - 1] - a, degeneracy_eps);
    F += big_phi(m, x[l.sensor - 1] - a);
  }
  return F;
}

}  // namespace dcool
