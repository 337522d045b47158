#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "dcool/errors.hpp"
#include "dcool/majorizer.hpp"
#include "dcool/nesterov.hpp"
#include "dcool/problem.hpp"
#include "dcool/prox.hpp"
#include "dcool/vec.hpp"

namespace dcool {

enum class MessageKind { YExchange, XBroadcast };

struct Message {
  MessageKind kind;
  int from;
  int to;
  Vec payload;
};

// Everything one sensor stores between synchronous rounds. Per-neighbor
// vectors are aligned with `neighbors` (ascending ids); the self copy and its
// multiplier are kept in dedicated fields so the duplicated-variable
// bookkeeping cannot drift apart structurally.
struct NodeState {
  int id = 0;
  Vec x;

  std::vector<int> neighbors;  // ascending sensor ids
  Vec y_self;                  // own copy y_ii
  Vec lambda_self;             // multiplier on y_ii = x_i
  std::vector<Vec> y;           // y_ij: local copy of neighbor j's position
  std::vector<Vec> lambda_out;  // multiplier on y_ij = x_j
  std::vector<Vec> lambda_in;   // multiplier on neighbor j's copy of x_i
  std::vector<Vec> neighbor_x;  // cache of x_j from the last broadcast
  std::vector<Vec> y_received;  // y_ji delivered this round
  std::vector<EdgeMajorizer> edge_majorizers;

  std::vector<int> anchor_ids;  // ascending anchor ids
  std::vector<Vec> anchor_pos;
  std::vector<double> anchor_range;
  std::vector<Vec> z;   // anchor-copy variables z_ik
  std::vector<Vec> mu;  // multipliers on z_ik = x_i
  std::vector<EdgeMajorizer> anchor_majorizers;

  long messages_sent = 0;

  int degree() const { return static_cast<int>(neighbors.size()); }
  int n_anchor_links() const { return static_cast<int>(anchor_ids.size()); }

  int neighbor_index(int j) const {
    auto it = std::lower_bound(neighbors.begin(), neighbors.end(), j);
    if (it == neighbors.end() || *it != j)
      throw Error("node " + std::to_string(id) + ": no neighbor " + std::to_string(j));
    return static_cast<int>(it - neighbors.begin());
  }
};

// Multiplier ascent step, shared so that both holders of a duplicated
// multiplier apply bitwise-identical arithmetic.
inline Vec dual_step(const Vec& lambda, double rho, const Vec& copy, const Vec& x) {
  return lambda + rho * (copy - x);
}

inline std::vector<NodeState> make_node_states(const NetworkProblem& pb,
                                               const NeighborSets& ns) {
  std::vector<NodeState> states(pb.n_sensors);
  for (int i = 1; i <= pb.n_sensors; ++i) {
    NodeState& s = states[i - 1];
    s.id = i;
    s.neighbors = ns.open_of(i);
    const int deg = s.degree();
    s.y.resize(deg);
    s.lambda_out.resize(deg);
    s.lambda_in.resize(deg);
    s.neighbor_x.resize(deg);
    s.y_received.resize(deg);
    s.edge_majorizers.resize(deg);
  }
  for (const AnchorLink& l : pb.anchor_links) {
    NodeState& s = states[l.sensor - 1];
    s.anchor_ids.push_back(l.anchor);
    s.anchor_pos.push_back(pb.anchors[l.anchor - 1]);
    s.anchor_range.push_back(l.r);
  }
  for (NodeState& s : states) {
    const int na = s.n_anchor_links();
    s.z.resize(na);
    s.mu.resize(na);
    s.anchor_majorizers.resize(na);
  }
  return states;
}

// Re-anchors one node for a fresh outer iteration: freezes the majorizer
// directions at the current outer iterate x_l, resets all multipliers, and
// primes copies and caches with x_l. Message counters are left untouched.
inline void prepare_outer_iteration(NodeState& s, const NetworkProblem& pb,
                                    std::span<const Vec> x_l, double degeneracy_eps) {
  const int p = pb.p;
  const Vec& xi = x_l[s.id - 1];
  s.x = xi;
  s.y_self = xi;
  s.lambda_self = zero_vec(p);
  for (int jdx = 0; jdx < s.degree(); ++jdx) {
    const Vec& xj = x_l[s.neighbors[jdx] - 1];
    const double d = *pb.edge_measurement(s.id, s.neighbors[jdx]);
    s.edge_majorizers[jdx] = EdgeMajorizer::from_direction(d, xi - xj, degeneracy_eps);
    s.y[jdx] = xj;
    s.lambda_out[jdx] = zero_vec(p);
    s.lambda_in[jdx] = zero_vec(p);
    s.neighbor_x[jdx] = xj;
    s.y_received[jdx] = xi;  // neighbor j's copy of x_i starts at consensus
  }
  for (int k = 0; k < s.n_anchor_links(); ++k) {
    s.anchor_majorizers[k] =
        EdgeMajorizer::from_direction(s.anchor_range[k], xi - s.anchor_pos[k], degeneracy_eps);
    s.z[k] = xi;
    s.mu[k] = zero_vec(p);
  }
}

// Local master objective at y_i: smoothed edge terms plus the quadratic tying
// y_ii to its own consensus target. Exposed for testing.
inline double local_master_value(const NodeState& s, const Vec& y_i, double rho,
                                 const AlgorithmConfig& cfg) {
  double val = 0.0;
  for (int jdx = 0; jdx < s.degree(); ++jdx) {
    Vec gamma = s.neighbor_x[jdx] - s.lambda_out[jdx] / rho;
    val += edge_term_eval(s.edge_majorizers[jdx], y_i, gamma, rho, cfg).value;
  }
  Vec gamma_self = s.x - s.lambda_self / rho;
  val += 0.5 * rho * (y_i - gamma_self).squaredNorm();
  return val;
}

// Solves the per-round local master problem in y_i and refreshes the coupled
// neighbor copies y_ij from its solution. Strong convexity rho, gradient
// Lipschitz rho (degree + 1); warm-started from the previous y_ii.
inline NesterovResult solve_local_master(NodeState& s, double rho, const AlgorithmConfig& cfg,
                                         ProxDiagnostics* diag = nullptr) {
  const Vec gamma_self = s.x - s.lambda_self / rho;
  const int deg = s.degree();
  auto grad = [&](const Vec& y_i) -> Vec {
    Vec g = rho * (y_i - gamma_self);
    for (int jdx = 0; jdx < deg; ++jdx) {
      Vec gamma = s.neighbor_x[jdx] - s.lambda_out[jdx] / rho;
      g += edge_term_eval(s.edge_majorizers[jdx], y_i, gamma, rho, cfg, diag).gradient;
    }
    return g;
  };
  SmoothStronglyConvexOracle<decltype(grad)> oracle{grad, rho, rho * (deg + 1)};
  NesterovResult res =
      nesterov_minimize(oracle, s.y_self, cfg.nesterov_tol, cfg.nesterov_max_iters);
  s.y_self = res.point;
  for (int jdx = 0; jdx < deg; ++jdx) {
    Vec gamma = s.neighbor_x[jdx] - s.lambda_out[jdx] / rho;
    s.y[jdx] =
        edge_term_eval(s.edge_majorizers[jdx], s.y_self, gamma, rho, cfg, diag).y_j_star;
  }
  return res;
}

// Updates every anchor-copy variable z_ik for the round.
inline void solve_anchor_vars(NodeState& s, double rho, const AlgorithmConfig& cfg,
                              ProxDiagnostics* diag = nullptr) {
  for (int k = 0; k < s.n_anchor_links(); ++k) {
    s.z[k] =
        anchor_subproblem(s.anchor_majorizers[k], s.x, s.mu[k], s.anchor_pos[k], rho, cfg, diag);
  }
}

// Averages multiplier-shifted copies of x_i held across the closed
// neighborhood and the anchor copies. received_y holds y_ji from each
// neighbor j, aligned with s.neighbors; it is cached for the dual update.
inline void primal_update(NodeState& s, std::span<const Vec> received_y, double rho) {
  if (static_cast<int>(received_y.size()) != s.degree())
    throw MissingNeighborMessage("node " + std::to_string(s.id) + ": expected " +
                                 std::to_string(s.degree()) + " position copies, got " +
                                 std::to_string(received_y.size()));
  const int p = static_cast<int>(s.x.size());
  Vec acc = zero_vec(p);
  // closed neighborhood in ascending id order, then anchors
  bool self_done = false;
  for (int jdx = 0; jdx < s.degree(); ++jdx) {
    if (!self_done && s.id < s.neighbors[jdx]) {
      acc += s.lambda_self / rho + s.y_self;
      self_done = true;
    }
    acc += s.lambda_in[jdx] / rho + received_y[jdx];
    s.y_received[jdx] = received_y[jdx];
  }
  if (!self_done) acc += s.lambda_self / rho + s.y_self;
  for (int k = 0; k < s.n_anchor_links(); ++k) acc += s.mu[k] / rho + s.z[k];
  s.x = acc / static_cast<double>(1 + s.degree() + s.n_anchor_links());
}

// Multiplier ascent for every constraint the node participates in.
// received_x holds the freshly broadcast x_j, aligned with s.neighbors; the
// neighbor cache is refreshed from it at the end of the round.
inline void dual_update(NodeState& s, std::span<const Vec> received_x, double rho) {
  if (static_cast<int>(received_x.size()) != s.degree())
    throw MissingNeighborMessage("node " + std::to_string(s.id) + ": expected " +
                                 std::to_string(s.degree()) + " broadcasts, got " +
                                 std::to_string(received_x.size()));
  s.lambda_self = dual_step(s.lambda_self, rho, s.y_self, s.x);
  for (int jdx = 0; jdx < s.degree(); ++jdx) {
    s.lambda_in[jdx] = dual_step(s.lambda_in[jdx], rho, s.y_received[jdx], s.x);
    s.lambda_out[jdx] = dual_step(s.lambda_out[jdx], rho, s.y[jdx], received_x[jdx]);
    s.neighbor_x[jdx] = received_x[jdx];
  }
  for (int k = 0; k < s.n_anchor_links(); ++k)
    s.mu[k] = dual_step(s.mu[k], rho, s.z[k], s.x);
}

inline void emit_y_messages(NodeState& s, std::vector<Message>& out) {
  for (int jdx = 0; jdx < s.degree(); ++jdx)
    out.push_back({MessageKind::YExchange, s.id, s.neighbors[jdx], s.y[jdx]});
  s.messages_sent += s.degree();
}

inline void emit_x_broadcast(NodeState& s, std::vector<Message>& out) {
  for (int jdx = 0; jdx < s.degree(); ++jdx)
    out.push_back({MessageKind::XBroadcast, s.id, s.neighbors[jdx], s.x});
  s.messages_sent += s.degree();
}

// ---- whole-network diagnostics (test support) ----

// Duplicated objective over all copies: every edge contributes once from each
// endpoint's frozen majorizer, every anchor link twice. At consensus this
// equals twice the surrogate cost.
inline double copied_objective(const NetworkProblem& pb, std::span<const NodeState> states) {
  double F = 0.0;
  for (const Edge& e : pb.edges) {
    const NodeState& si = states[e.i - 1];
    const NodeState& sj = states[e.j - 1];
    const int jdx = si.neighbor_index(e.j);
    const int idx = sj.neighbor_index(e.i);
    F += big_phi(si.edge_majorizers[jdx], si.y_self - si.y[jdx]);
    F += big_phi(sj.edge_majorizers[idx], sj.y_self - sj.y[idx]);
  }
  for (const NodeState& s : states) {
    for (int k = 0; k < s.n_anchor_links(); ++k)
      F += 2.0 * big_phi(s.anchor_majorizers[k], s.z[k] - s.anchor_pos[k]);
  }
  return F;
}

// Augmented Lagrangian written against the consensus constraints
// (copy = original): multiplier terms and penalties over y_ji = x_i and
// z_ik = x_i for every stored copy.
inline double augmented_lagrangian(const NetworkProblem& pb, std::span<const NodeState> states,
                                   double rho) {
  double L = copied_objective(pb, states);
  for (const NodeState& si : states) {
    // j == i copy held locally
    L += si.lambda_self.dot(si.y_self - si.x) + 0.5 * rho * (si.y_self - si.x).squaredNorm();
    // copies of x_i held by each neighbor j; multiplier read from i's ledger
    for (int jdx = 0; jdx < si.degree(); ++jdx) {
      const NodeState& sj = states[si.neighbors[jdx] - 1];
      const Vec& y_ji = sj.y[sj.neighbor_index(si.id)];
      L += si.lambda_in[jdx].dot(y_ji - si.x) + 0.5 * rho * (y_ji - si.x).squaredNorm();
    }
    for (int k = 0; k < si.n_anchor_links(); ++k)
      L += si.mu[k].dot(si.z[k] - si.x) + 0.5 * rho * (si.z[k] - si.x).squaredNorm();
  }
  return L;
}

// The same quantity assembled from per-node terms the way the distributed
// updates see it, using each node's own multiplier copies and caches.
inline double augmented_lagrangian_decomposed(const NetworkProblem& pb,
                                              std::span<const NodeState> states, double rho) {
  double L = copied_objective(pb, states);
  for (const NodeState& si : states) {
    L += si.lambda_self.dot(si.y_self - si.x) + 0.5 * rho * (si.y_self - si.x).squaredNorm();
    for (int jdx = 0; jdx < si.degree(); ++jdx) {
      const NodeState& sj = states[si.neighbors[jdx] - 1];
      // term for i's copy of x_j, multiplier held by i, actual x_j read at j
      L += si.lambda_out[jdx].dot(si.y[jdx] - sj.x) +
           0.5 * rho * (si.y[jdx] - sj.x).squaredNorm();
    }
    for (int k = 0; k < si.n_anchor_links(); ++k)
      L += si.mu[k].dot(si.z[k] - si.x) + 0.5 * rho * (si.z[k] - si.x).squaredNorm();
  }
  return L;
}

// Largest consensus violation across all duplicated variables.
inline double consensus_residual(std::span<const NodeState> states) {
  double r = 0.0;
  for (const NodeState& si : states) {
    r = std::max(r, (si.y_self - si.x).norm());
    for (int jdx = 0; jdx < si.degree(); ++jdx)
      r = std::max(r, (si.y_received[jdx] - si.x).norm());
    for (int k = 0; k < si.n_anchor_links(); ++k)
      r = std::max(r, (si.z[k] - si.x).norm());
  }
  return r;
}

}  // namespace dcool
