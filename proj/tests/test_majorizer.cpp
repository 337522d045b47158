#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dcool/majorizer.hpp"
#include "dcool/rng.hpp"
#include "support/oracles.hpp"

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
Vec rand_vec(RngStream& rng, int p, double scale) {
  Vec v(p);
  for (int c = 0; c < p; ++c) v[c] = scale * rng.normal();
  return v;
}
}  // namespace

TEST_CASE("phi, projection, g_plus, huber hand values", "[majorizer]") {
  REQUIRE(phi(0.1, v2(0.5, 0)) == Catch::Approx(0.16).margin(1e-15));
  REQUIRE(phi(1.0, v2(0, 0)) == 1.0);

  Vec pr = ball_project(1.0, v2(3, 4));
  REQUIRE(pr[0] == Catch::Approx(0.6).margin(1e-15));
  REQUIRE(pr[1] == Catch::Approx(0.8).margin(1e-15));
  Vec inside = v2(0.1, -0.2);
  REQUIRE(ball_project(1.0, inside) == inside);
  REQUIRE(ball_project(0.0, v2(0, 0)).norm() == 0.0);

  ValueGrad g = g_plus(1.0, v2(2, 0));
  REQUIRE(g.value == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(g.gradient[0] == Catch::Approx(2.0).margin(1e-15));
  REQUIRE(g.gradient[1] == 0.0);
  ValueGrad g0 = g_plus(1.0, v2(0.3, 0.4));
  REQUIRE(g0.value == 0.0);
  REQUIRE(g0.gradient.norm() == 0.0);

  ValueDeriv h = huber(0.5, 0.7);
  REQUIRE(h.value == Catch::Approx(0.45).margin(1e-15));
  REQUIRE(h.derivative == Catch::Approx(1.0).margin(1e-15));
  ValueDeriv h2 = huber(0.7, 0.5);
  REQUIRE(h2.value == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(h2.derivative == Catch::Approx(1.0).margin(1e-15));
  ValueDeriv h3 = huber(0.5, -0.7);
  REQUIRE(h3.value == Catch::Approx(0.45).margin(1e-15));
  REQUIRE(h3.derivative == Catch::Approx(-1.0).margin(1e-15));
  // seam: both branches agree
  REQUIRE(huber(0.5, 0.5).value == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(huber(0.5, 0.5).derivative == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("majorizer hand values along a frozen direction", "[majorizer]") {
  const EdgeMajorizer m = EdgeMajorizer::from_direction(0.5, v2(2, 0), 1e-12);
  REQUIRE_FALSE(m.degenerate());
  REQUIRE(m.v_hat()[0] == Catch::Approx(1.0).margin(1e-15));

  REQUIRE(big_phi(m, v2(0.9, 0)) == Catch::Approx(0.16).margin(1e-15));
  REQUIRE(big_phi(m, v2(0, 0)) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(big_phi(m, v2(-0.2, 0)) == Catch::Approx(0.45).margin(1e-15));

  REQUIRE(quadratic_major(m, v2(0.9, 0)) == Catch::Approx(0.16).margin(1e-15));
  REQUIRE(quadratic_major(m, v2(0, 0)) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(quadratic_major(m, v2(1.2, 0)) == Catch::Approx(0.49).margin(1e-15));
}

TEST_CASE("majorization chain phi <= big_phi <= quadratic, tight at v", "[majorizer]") {
  RngStream rng(11, "major-chain");
  for (int rep = 0; rep < 2000; ++rep) {
    const int p = 1 + rng.uniform_int(3);
    const double d = rng.uniform(0.05, 1.5);
    Vec v = rand_vec(rng, p, 1.0);
    if (v.norm() < 1e-6) continue;
    Vec u = rand_vec(rng, p, 1.2);
    const EdgeMajorizer m = EdgeMajorizer::from_direction(d, v, 1e-12);

    const double f = phi(d, u);
    const double F = big_phi(m, u);
    const double Q = quadratic_major(m, u);
    REQUIRE(F >= f - 1e-12);
    REQUIRE(Q >= F - 1e-12);

    REQUIRE(big_phi(m, v) == Catch::Approx(phi(d, v)).margin(1e-12));
    REQUIRE(quadratic_major(m, v) == Catch::Approx(phi(d, v)).margin(1e-12));
  }
}

TEST_CASE("big_phi is midpoint convex", "[majorizer]") {
  RngStream rng(12, "major-convex");
  for (int rep = 0; rep < 2000; ++rep) {
    const int p = 1 + rng.uniform_int(3);
    const double d = rng.uniform(0.05, 1.5);
    const EdgeMajorizer m = EdgeMajorizer::from_direction(d, rand_vec(rng, p, 1.0), 1e-12);
    if (m.degenerate()) continue;
    Vec u1 = rand_vec(rng, p, 1.5), u2 = rand_vec(rng, p, 1.5);
    Vec mid = 0.5 * (u1 + u2);
    REQUIRE(big_phi(m, mid) <= 0.5 * (big_phi(m, u1) + big_phi(m, u2)) + 1e-12);
  }
}

TEST_CASE("big_phi depends on the direction only through its ray", "[majorizer]") {
  RngStream rng(13, "major-scale");
  for (int rep = 0; rep < 300; ++rep) {
    const double d = rng.uniform(0.05, 1.5);
    Vec v = rand_vec(rng, 2, 1.0);
    if (v.norm() < 1e-6) continue;
    Vec u = rand_vec(rng, 2, 1.2);
    const EdgeMajorizer m = EdgeMajorizer::from_direction(d, v, 1e-12);
    // power-of-two rescaling is lossless, so values must match bitwise
    for (double c : {0.5, 2.0, 1024.0}) {
      const EdgeMajorizer mc = EdgeMajorizer::from_direction(d, Vec(c * v), 1e-12);
      REQUIRE(big_phi(mc, u) == big_phi(m, u));
    }
    const EdgeMajorizer m3 = EdgeMajorizer::from_direction(d, Vec(3.0 * v), 1e-12);
    REQUIRE(big_phi(m3, u) == Catch::Approx(big_phi(m, u)).epsilon(1e-13).margin(1e-15));
  }
}

TEST_CASE("big_phi symmetry under joint sign flip", "[majorizer]") {
  RngStream rng(14, "major-sym");
  for (int rep = 0; rep < 300; ++rep) {
    const double d = rng.uniform(0.05, 1.5);
    Vec v = rand_vec(rng, 3, 1.0);
    Vec u = rand_vec(rng, 3, 1.2);
    if (v.norm() < 1e-6) continue;
    const EdgeMajorizer m = EdgeMajorizer::from_direction(d, v, 1e-12);
    const EdgeMajorizer mneg = EdgeMajorizer::from_direction(d, Vec(-v), 1e-12);
    REQUIRE(big_phi(mneg, Vec(-u)) == big_phi(m, u));
  }
}

TEST_CASE("degenerate direction falls back to the quadratic bound", "[majorizer]") {
  const EdgeMajorizer m = EdgeMajorizer::from_direction(0.3, v2(0, 0), 1e-12);
  REQUIRE(m.degenerate());
  REQUIRE(big_phi(m, v2(0.5, 0)) == Catch::Approx(0.25 + 0.09).margin(1e-15));
  REQUIRE(big_phi(m, v2(0, 0)) == Catch::Approx(0.09).margin(1e-15));  // tight at v = 0
  REQUIRE(phi(0.3, v2(0, 0)) == Catch::Approx(0.09).margin(1e-15));
  REQUIRE_THROWS_AS(quadratic_major(m, v2(0.5, 0)), DegenerateDirection);

  // below vs above the threshold
  REQUIRE(EdgeMajorizer::from_direction(1.0, v2(1e-13, 0), 1e-12).degenerate());
  REQUIRE_FALSE(EdgeMajorizer::from_direction(1.0, v2(1e-11, 0), 1e-12).degenerate());

  // majorization survives the fallback
  RngStream rng(15, "major-degen");
  for (int rep = 0; rep < 500; ++rep) {
    Vec u = rand_vec(rng, 2, 1.0);
    const double d = rng.uniform(0.0, 1.0);
    const EdgeMajorizer md = EdgeMajorizer::from_direction(d, v2(0, 0), 1e-12);
    REQUIRE(big_phi(md, u) >= phi(d, u) - 1e-12);
  }
}

TEST_CASE("zero-range edges collapse to a pure quadratic", "[majorizer]") {
  const EdgeMajorizer m = EdgeMajorizer::from_direction(0.0, v2(1, 0), 1e-12);
  REQUIRE_FALSE(m.degenerate());
  REQUIRE(big_phi(m, v2(0.3, 0.4)) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(big_phi(m, v2(0.3, 0.4)) == Catch::Approx(phi(0.0, v2(0.3, 0.4))).margin(1e-15));
}

TEST_CASE("g_plus gradient matches finite differences off the sphere", "[majorizer]") {
  RngStream rng(16, "gplus-fd");
  int checked = 0;
  while (checked < 1000) {
    const int p = 1 + rng.uniform_int(3);
    const double d = rng.uniform(0.05, 1.5);
    Vec u = rand_vec(rng, p, 1.2);
    if (std::abs(u.norm() - d) < 1e-3) continue;
    ValueGrad g = g_plus(d, u);
    Vec fd = oracle::fd_gradient([&](const Vec& x) { return g_plus(d, x).value; }, u, 1e-6);
    for (int c = 0; c < p; ++c)
      REQUIRE(std::abs(fd[c] - g.gradient[c]) <= 1e-5 * std::max(1.0, std::abs(g.gradient[c])));
    ++checked;
  }
}

TEST_CASE("big_phi rejects dimension mismatches", "[majorizer]") {
  const EdgeMajorizer m = EdgeMajorizer::from_direction(1.0, v2(1, 0), 1e-12);
  REQUIRE_THROWS_AS(big_phi(m, v1(1.0)), DimensionMismatch);
  REQUIRE_THROWS_AS(quadratic_major(m, v1(1.0)), DimensionMismatch);
}
