#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dcool/errors.hpp"
#include "dcool/vec.hpp"

namespace dcool {

// First-order oracle for a mu-strongly convex function with L-Lipschitz
// gradient. GradFn maps Vec -> Vec.
template <typename GradFn>
struct SmoothStronglyConvexOracle {
  GradFn gradient;
  double mu;
  double lipschitz;
};

struct NesterovResult {
  Vec point;
  double grad_norm;
  int iterations;  // gradient steps taken
};

// Accelerated gradient descent with the constant momentum
// beta = (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)).
//
// One gradient evaluation per iteration, taken at the extrapolated point; the
// returned point is the extrapolated point whose gradient met the tolerance,
// so the caller gets the certificate ||grad|| <= tol for the point actually
// returned. An already-optimal init returns after zero steps.
template <typename GradFn>
NesterovResult nesterov_minimize(const SmoothStronglyConvexOracle<GradFn>& oracle,
                                 const Vec& init, double tol, int max_iters) {
  const double mu = oracle.mu;
  const double L = oracle.lipschitz;
  if (!(mu > 0.0) || !(L >= mu))
    throw std::invalid_argument("nesterov_minimize: need 0 < mu <= lipschitz, got mu=" +
                                std::to_string(mu) + " L=" + std::to_string(L));
  const double beta = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));

  Vec y = init;      // last gradient-step iterate
  Vec y_hat = init;  // extrapolated point, where gradients are evaluated
  for (int iter = 0;; ++iter) {
    Vec g = oracle.gradient(y_hat);
    if (!all_finite(g) || !all_finite(y_hat))
      throw NonFiniteIterate("nesterov_minimize: non-finite iterate at step " +
                             std::to_string(iter));
    const double gn = g.norm();
    if (gn <= tol || iter >= max_iters) return {y_hat, gn, iter};
    Vec y_next = y_hat - g / L;
    y_hat = y_next + beta * (y_next - y);
    y = std::move(y_next);
  }
}

}  // namespace dcool
