#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dcool/nesterov.hpp"

using namespace dcool;

namespace {
Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}
Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("well-conditioned quadratic solves in one step", "[nesterov]") {
  auto grad = [](const Vec& x) { return Vec(x - v1(3.0)); };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, 1.0, 1.0};
  NesterovResult res = nesterov_minimize(oracle, v1(0.0), 1e-12, 100);
  REQUIRE(res.iterations == 1);
  REQUIRE(res.point[0] == 3.0);
  REQUIRE(res.grad_norm == 0.0);
}

TEST_CASE("already optimal init returns after zero steps", "[nesterov]") {
  auto grad = [](const Vec& x) { return Vec(2.0 * x); };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, 2.0, 2.0};
  Vec x0 = v2(0.0, 0.0);
  NesterovResult res = nesterov_minimize(oracle, x0, 1e-9, 100);
  REQUIRE(res.iterations == 0);
  REQUIRE(res.point == x0);
}

TEST_CASE("returned point carries the gradient certificate", "[nesterov]") {
  // f = (x^2 + 25 y^2) / 2
  auto grad = [](const Vec& x) { return Vec(v2(x[0], 25.0 * x[1])); };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, 1.0, 25.0};
  NesterovResult res = nesterov_minimize(oracle, v2(1.0, 1.0), 1e-9, 500);
  REQUIRE(res.grad_norm <= 1e-9);
  REQUIRE(grad(res.point).norm() == res.grad_norm);
  REQUIRE(res.point.norm() <= 1e-9);
  REQUIRE(res.iterations < 200);

  // plain gradient descent on the same problem needs noticeably more steps
  Vec x = v2(1.0, 1.0);
  int gd_iters = 0;
  while (grad(x).norm() > 1e-9 && gd_iters < 2000) {
    x -= grad(x) / 25.0;
    ++gd_iters;
  }
  REQUIRE(res.iterations * 2 < gd_iters);
}

TEST_CASE("iteration cap returns the capped iterate", "[nesterov]") {
  auto grad = [](const Vec& x) { return Vec(v2(x[0], 25.0 * x[1])); };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, 1.0, 25.0};
  NesterovResult res = nesterov_minimize(oracle, v2(1.0, 1.0), 1e-14, 3);
  REQUIRE(res.iterations == 3);
  REQUIRE(res.grad_norm > 1e-14);
  REQUIRE(all_finite(res.point));
}

TEST_CASE("parameter and finiteness guards", "[nesterov]") {
  auto grad = [](const Vec& x) { return x; };
  SmoothStronglyConvexOracle<decltype(grad)> bad_mu{grad, 0.0, 1.0};
  REQUIRE_THROWS_AS(nesterov_minimize(bad_mu, v1(1.0), 1e-9, 10), std::invalid_argument);
  SmoothStronglyConvexOracle<decltype(grad)> bad_L{grad, 2.0, 1.0};
  REQUIRE_THROWS_AS(nesterov_minimize(bad_L, v1(1.0), 1e-9, 10), std::invalid_argument);

  auto nan_grad = [](const Vec& x) { return Vec(x * std::nan("")); };
  SmoothStronglyConvexOracle<decltype(nan_grad)> nasty{nan_grad, 1.0, 1.0};
  REQUIRE_THROWS_AS(nesterov_minimize(nasty, v1(1.0), 1e-9, 10), NonFiniteIterate);
}
