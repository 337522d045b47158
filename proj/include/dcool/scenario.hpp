#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcool/errors.hpp"
#include "dcool/problem.hpp"
#include "dcool/rng.hpp"
#include "dcool/vec.hpp"

namespace dcool {

// Substream tags. Keeping placement, measurement noise and initialization
// noise on separate streams means e.g. raising sigma_init cannot change which
// network gets generated for a given (seed, trial).
inline constexpr const char* kPlacementTag = "placement";
inline constexpr const char* kMeasurementNoiseTag = "measurement-noise";
inline constexpr const char* kInitNoiseTag = "init-noise";

enum class AnchorMode { Corners, Random };

inline const char* to_string(AnchorMode m) {
  return m == AnchorMode::Corners ? "corners" : "random";
}

// Random geometric network recipe: sensors uniform in [0, side]^p, an edge
// wherever the true distance is at most comm_range (sensor-sensor and
// sensor-anchor alike), anchors either on the corners of the region or
// uniform like the sensors.
struct ScenarioConfig {
  int p = 2;
  int n_sensors = 50;
  int n_anchors = 4;
  double side = 1.0;
  double comm_range = 0.24;
  AnchorMode anchor_mode = AnchorMode::Corners;
  double sigma = 0.0;       // multiplicative range-noise scale
  double sigma_init = 0.1;  // additive init-noise scale
  int mc_trials = 1;
  std::uint64_t seed = 0;
};

inline void check_scenario(const ScenarioConfig& sc) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid scenario: " + m); };
  if (sc.p != 2 && sc.p != 3) fail("p must be 2 or 3");
  if (sc.n_sensors < 1) fail("n_sensors must be >= 1");
  if (sc.n_anchors < 0) fail("n_anchors must be >= 0");
  if (sc.anchor_mode == AnchorMode::Corners && sc.n_anchors > (1 << sc.p))
    fail("corner anchor mode supports at most 2^p anchors");
  if (!(sc.side > 0.0)) fail("side must be positive");
  if (!(sc.comm_range > 0.0)) fail("comm_range must be positive");
  if (sc.sigma < 0.0 || sc.sigma_init < 0.0) fail("noise scales must be >= 0");
  if (sc.mc_trials < 1) fail("mc_trials must be >= 1");
}

// One network drawn from the recipe, with the ground truth that produced it.
// Measurements in `problem` are exact distances; add noise separately.
struct Scenario {
  NetworkProblem problem;
  std::vector<Vec> true_positions;
};

// Corner anchors in lexicographic binary order: (0,0), (0,side), (side,0),
// (side,side) for p = 2.
inline std::vector<Vec> corner_anchors(int p, double side, int count) {
  std::vector<Vec> out;
  for (int mask = 0; mask < (1 << p) && static_cast<int>(out.size()) < count; ++mask) {
    Vec a(p);
    for (int c = 0; c < p; ++c) a[c] = ((mask >> (p - 1 - c)) & 1) ? side : 0.0;
    out.push_back(a);
  }
  return out;
}

inline constexpr int kConnectivityRetryCap = 1000;

// Draws networks until the sensor graph is connected, re-drawing everything
// from fresh randomness on each attempt. Throws ConnectivityExhausted after
// the retry cap.
inline Scenario generate_scenario(const ScenarioConfig& sc, RngStream& rng) {
  check_scenario(sc);
  for (int attempt = 0; attempt < kConnectivityRetryCap; ++attempt) {
    Scenario s;
    s.true_positions.resize(sc.n_sensors);
    for (int i = 0; i < sc.n_sensors; ++i) {
      Vec x(sc.p);
      for (int c = 0; c < sc.p; ++c) x[c] = rng.uniform(0.0, sc.side);
      s.true_positions[i] = x;
    }
    std::vector<Vec> anchors;
    if (sc.anchor_mode == AnchorMode::Corners) {
      anchors = corner_anchors(sc.p, sc.side, sc.n_anchors);
    } else {
      for (int k = 0; k < sc.n_anchors; ++k) {
        Vec a(sc.p);
        for (int c = 0; c < sc.p; ++c) a[c] = rng.uniform(0.0, sc.side);
        anchors.push_back(a);
      }
    }

    ProblemBuilder builder(sc.p, sc.n_sensors);
    for (const Vec& a : anchors) builder.add_anchor(a);
    for (int i = 1; i <= sc.n_sensors; ++i) {
      for (int j = i + 1; j <= sc.n_sensors; ++j) {
        const double dist = (s.true_positions[i - 1] - s.true_positions[j - 1]).norm();
        if (dist <= sc.comm_range) builder.add_range_measurement(i, j, dist);
      }
      for (int k = 1; k <= static_cast<int>(anchors.size()); ++k) {
        const double dist = (s.true_positions[i - 1] - anchors[k - 1]).norm();
        if (dist <= sc.comm_range) builder.add_anchor_measurement(i, k, dist);
      }
    }
    s.problem = builder.build();
    if (check_problem(s.problem).ok()) return s;
  }
  throw ConnectivityExhausted("generate_scenario: no connected network in " +
                              std::to_string(kConnectivityRetryCap) + " attempts");
}

// Replaces every measurement with true_distance * |n|, n ~ N(1, sigma^2),
// one independent draw per measurement, edges first then anchor links, both
// in their stored (sorted) order.
inline void apply_measurement_noise(NetworkProblem& pb, std::span<const Vec> truth,
                                    double sigma, RngStream& rng) {
  for (Edge& e : pb.edges) {
    const double dist = (truth[e.i - 1] - truth[e.j - 1]).norm();
    e.d = dist * std::abs(1.0 + sigma * rng.normal());
  }
  for (AnchorLink& l : pb.anchor_links) {
    const double dist = (truth[l.sensor - 1] - pb.anchors[l.anchor - 1]).norm();
    l.r = dist * std::abs(1.0 + sigma * rng.normal());
  }
}

// Initial iterate: ground truth plus N(0, sigma_init^2) per coordinate.
inline std::vector<Vec> apply_init_noise(std::span<const Vec> truth, double sigma_init,
                                         RngStream& rng) {
  std::vector<Vec> x0;
  x0.reserve(truth.size());
  for (const Vec& xt : truth) {
    Vec x = xt;
    for (Eigen::Index c = 0; c < x.size(); ++c) x[c] += sigma_init * rng.normal();
    x0.push_back(x);
  }
  return x0;
}

}  // namespace dcool
