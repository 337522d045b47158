#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dcool/errors.hpp"
#include "dcool/majorizer.hpp"
#include "dcool/nesterov.hpp"
#include "dcool/problem.hpp"
#include "dcool/vec.hpp"

namespace dcool {

// One proximal subproblem: minimize big_phi(u) + (rho/2) ||u - w||^2.
// rho here is the prox weight of this instance, which is not always the
// consensus penalty (the anchor subproblem uses half of it).
struct ProxInstance {
  EdgeMajorizer majorizer;
  Vec w;
  double rho;
};

enum class ProxPath {
  ClosedForm,     // degenerate direction or d == 0: plain quadratic
  LowerEndpoint,  // dual certificate at omega = 0
  UpperEndpoint,  // dual certificate at omega = 1
  Bisection,
};

struct ProxResult {
  Vec u_star;
  double value;       // attained prox objective
  double omega_star;  // dual weight actually used
  ProxPath path;
};

// Accumulated over every prox call routed through the same struct; used by
// the test-suite to certify solver behaviour in bulk.
struct ProxDiagnostics {
  long psi_solves = 0;
  long nesterov_iters = 0;
  double max_norm_excess = -std::numeric_limits<double>::infinity();
  double last_psi_dot = 0.0;
};

// Tolerance on the dual derivative below which bisection stops early.
inline constexpr double kPsiDotTol = 1e-12;

// Value of the weighted inner objective
//   Psi_omega(u) = (rho/2)||u - w||^2 + omega * g(u) + (1 - omega) * h(v.u - d).
inline double psi_omega_value(const ProxInstance& inst, double omega, const Vec& u) {
  const EdgeMajorizer& m = inst.majorizer;
  double val = 0.5 * inst.rho * (u - inst.w).squaredNorm();
  val += omega * g_plus(m.d(), u).value;
  val += (1.0 - omega) * huber(m.d(), m.v_hat().dot(u) - m.d()).value;
  return val;
}

// Minimizes Psi_omega. Strong convexity rho, gradient Lipschitz rho + 2
// (both majorizer pieces have 2-Lipschitz gradients and weights summing
// to one).
inline Vec psi_omega_minimize(const ProxInstance& inst, double omega, const Vec& warm_start,
                              const AlgorithmConfig& cfg, ProxDiagnostics* diag = nullptr) {
  const EdgeMajorizer& m = inst.majorizer;
  const double d = m.d();
  const double rho = inst.rho;
  auto grad = [&](const Vec& u) -> Vec {
    Vec g = rho * (u - inst.w);
    if (omega > 0.0) g += (2.0 * omega) * (u - ball_project(d, u));
    if (omega < 1.0) {
      const double hdot = huber(d, m.v_hat().dot(u) - d).derivative;
      g += ((1.0 - omega) * hdot) * m.v_hat();
    }
    return g;
  };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, rho, rho + 2.0};
  NesterovResult res = nesterov_minimize(oracle, warm_start, cfg.nesterov_tol,
                                         cfg.nesterov_max_iters);
  if (diag) {
    diag->psi_solves += 1;
    diag->nesterov_iters += res.iterations;
    const double excess = res.point.norm() - (inst.w.norm() + 4.0 * d / rho);
    if (excess > diag->max_norm_excess) diag->max_norm_excess = excess;
  }
  return res.point;
}

// Derivative of the dual function at omega, evaluated through the primal
// minimizer of Psi_omega: the gap g(u*) - h(v.u* - d) between the two
// majorizer pieces.
inline double psi_derivative(const ProxInstance& inst, const Vec& u_star) {
  const EdgeMajorizer& m = inst.majorizer;
  return g_plus(m.d(), u_star).value - huber(m.d(), m.v_hat().dot(u_star) - m.d()).value;
}

// Prox of the majorizer: argmin_u big_phi(u) + (rho/2)||u - w||^2.
//
// The max of the two convex pieces is handled by maximizing the concave dual
// over the mixing weight omega in [0, 1]. Endpoint derivative signs certify
// omega* = 0 or 1 without any bisection; otherwise bisect on the derivative
// sign, warm-starting each inner solve from the previous minimizer.
inline ProxResult moreau_prox(const ProxInstance& inst, const AlgorithmConfig& cfg,
                              ProxDiagnostics* diag = nullptr) {
  const EdgeMajorizer& m = inst.majorizer;
  const double rho = inst.rho;
  if (!(rho > 0.0)) throw std::invalid_argument("moreau_prox: prox weight must be positive");
  if (inst.w.size() != m.dim()) throw DimensionMismatch("moreau_prox: w has wrong dimension");

  auto objective = [&](const Vec& u) {
    return big_phi(m, u) + 0.5 * rho * (u - inst.w).squaredNorm();
  };

  if (m.degenerate() || m.d() == 0.0) {
    // big_phi is ||u||^2 plus a constant: single quadratic, exact minimizer.
    Vec u = (rho / (rho + 2.0)) * inst.w;
    return {u, objective(u), 0.0, ProxPath::ClosedForm};
  }

  Vec u0 = psi_omega_minimize(inst, 0.0, inst.w, cfg, diag);
  const double s0 = psi_derivative(inst, u0);
  if (diag) diag->last_psi_dot = s0;
  if (s0 <= 0.0) return {u0, objective(u0), 0.0, ProxPath::LowerEndpoint};

  Vec u1 = psi_omega_minimize(inst, 1.0, u0, cfg, diag);
  const double s1 = psi_derivative(inst, u1);
  if (diag) diag->last_psi_dot = s1;
  if (s1 >= 0.0) return {u1, objective(u1), 1.0, ProxPath::UpperEndpoint};

  double lo = 0.0, hi = 1.0;
  Vec u = u1;
  double c = 1.0;
  while (hi - lo > cfg.bisection_tol) {
    c = 0.5 * (lo + hi);
    u = psi_omega_minimize(inst, c, u, cfg, diag);
    const double sc = psi_derivative(inst, u);
    if (diag) diag->last_psi_dot = sc;
    if (std::abs(sc) <= kPsiDotTol) break;
    if (sc > 0.0)
      lo = c;
    else
      hi = c;
  }
  return {u, objective(u), c, ProxPath::Bisection};
}

// Smoothed per-edge term of the local master objective:
//   H_edge(y_i) = min_u big_phi(u) + (rho/2)||u - (y_i - gamma)||^2
// together with its gradient rho (y_i - u* - gamma) and the coupled-variable
// minimizer y_j* = y_i - u*. The gradient is rho-Lipschitz in y_i.
struct EdgeTermResult {
  double value;
  Vec gradient;
  Vec y_j_star;
};

inline EdgeTermResult edge_term_eval(const EdgeMajorizer& m, const Vec& y_i, const Vec& gamma,
                                     double rho, const AlgorithmConfig& cfg,
                                     ProxDiagnostics* diag = nullptr) {
  ProxInstance inst{m, y_i - gamma, rho};
  ProxResult pr = moreau_prox(inst, cfg, diag);
  Vec y_j_star = y_i - pr.u_star;
  Vec grad = rho * (y_j_star - gamma);
  return {pr.value, std::move(grad), std::move(y_j_star)};
}

// Anchor-copy subproblem:
//   argmin_z 2 big_phi(z - a) + mu.(z - x) + (rho/2)||z - x||^2.
// Completing the square and substituting u = z - a reduces it to a prox of
// the same majorizer with weight rho/2 and center x - mu/rho - a.
inline Vec anchor_subproblem(const EdgeMajorizer& m, const Vec& x, const Vec& mu, const Vec& a,
                             double rho, const AlgorithmConfig& cfg,
                             ProxDiagnostics* diag = nullptr) {
  ProxInstance inst{m, x - mu / rho - a, 0.5 * rho};
  ProxResult pr = moreau_prox(inst, cfg, diag);
  return a + pr.u_star;
}

}  // namespace dcool
