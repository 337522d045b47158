#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dcool/errors.hpp"
#include "dcool/majorizer.hpp"
#include "dcool/node.hpp"
#include "dcool/parallel.hpp"
#include "dcool/problem.hpp"
#include "dcool/vec.hpp"

namespace dcool {

// Outer-loop descent is checked up to this additive slack, absorbing the
// inexactness of inner solves run to their own tolerances.
inline constexpr double kDescentSlack = 1e-6;

struct InnerTraceRow {
  int l = 0;  // outer iteration (0-based)
  int t = 0;  // round within the outer iteration (1-based)
  double f = 0.0;
  double surrogate = 0.0;
  double max_residual = 0.0;
  long messages_cumulative = 0;
};

struct DcoolnetRun {
  std::vector<std::vector<Vec>> iterates;  // positions after 0..outer_iters refreshes
  std::vector<double> outer_f;             // cost at the start of each outer iteration
  double final_f = 0.0;
  std::vector<InnerTraceRow> inner;
  std::vector<long> messages_per_node;
};

namespace detail {

inline void route_messages(const std::vector<std::vector<Message>>& outboxes,
                           std::vector<NodeState>& states,
                           std::vector<std::vector<Vec>>& mail, std::vector<int>& scratch) {
  scratch.assign(states.size(), 0);
  for (const auto& box : outboxes) {
    for (const Message& msg : box) {
      NodeState& to = states[msg.to - 1];
      mail[msg.to - 1][to.neighbor_index(msg.from)] = msg.payload;
      ++scratch[msg.to - 1];
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (scratch[i] != states[i].degree())
      throw MissingNeighborMessage("node " + std::to_string(i + 1) + " received " +
                                   std::to_string(scratch[i]) + " of " +
                                   std::to_string(states[i].degree()) + " messages");
  }
}

}  // namespace detail

// Runs the synchronous rounds of one outer iteration on prepared node states.
// Each round has three phases separated by delivery barriers: local solves
// followed by a copy exchange, the averaging step followed by a position
// broadcast, then multiplier ascent. Nodes within a phase are independent, so
// an optional pool may execute them in any order with identical results.
// Returns the positions after the last round.
inline std::vector<Vec> run_admm_inner(std::vector<NodeState>& states, const NetworkProblem& pb,
                                       const AlgorithmConfig& cfg, ThreadPool* pool = nullptr,
                                       int outer_index = 0, std::span<const Vec> x_bar = {},
                                       std::vector<InnerTraceRow>* trace = nullptr) {
  const int n = static_cast<int>(states.size());
  std::vector<std::vector<Vec>> y_mail(n), x_mail(n);
  std::vector<std::vector<Message>> outboxes(n);
  for (int i = 0; i < n; ++i) {
    y_mail[i].assign(states[i].degree(), zero_vec(pb.p));
    x_mail[i].assign(states[i].degree(), zero_vec(pb.p));
  }
  std::vector<int> scratch;
  std::vector<Vec> xs(n);

  auto for_nodes = [&](const std::function<void(int)>& body) {
    if (pool)
      pool->parallel_for(n, body);
    else
      for (int i = 0; i < n; ++i) body(i);
  };

  for (int t = 1; t <= cfg.inner_iters; ++t) {
    for_nodes([&](int i) {
      outboxes[i].clear();
      solve_local_master(states[i], cfg.rho, cfg);
      solve_anchor_vars(states[i], cfg.rho, cfg);
      emit_y_messages(states[i], outboxes[i]);
    });
    detail::route_messages(outboxes, states, y_mail, scratch);

    for_nodes([&](int i) {
      outboxes[i].clear();
      primal_update(states[i], y_mail[i], cfg.rho);
      emit_x_broadcast(states[i], outboxes[i]);
    });
    detail::route_messages(outboxes, states, x_mail, scratch);

    for_nodes([&](int i) { dual_update(states[i], x_mail[i], cfg.rho); });

    const bool want_residual = trace != nullptr || cfg.residual_early_exit;
    double residual = 0.0;
    if (want_residual) residual = consensus_residual(states);
    if (trace) {
      for (int i = 0; i < n; ++i) xs[i] = states[i].x;
      long total = 0;
      for (const NodeState& s : states) total += s.messages_sent;
      InnerTraceRow row;
      row.l = outer_index;
      row.t = t;
      row.f = global_cost(pb, xs);
      row.surrogate = x_bar.empty() ? 0.0 : surrogate_cost(pb, xs, x_bar, cfg.degeneracy_eps);
      row.max_residual = residual;
      row.messages_cumulative = total;
      trace->push_back(row);
    }
    if (cfg.residual_early_exit && residual <= cfg.residual_exit_tol) break;
  }

  for (int i = 0; i < n; ++i) xs[i] = states[i].x;
  return xs;
}

// Full solver: refreshes the convex surrogate at the current iterate, runs
// the synchronous consensus rounds to minimize it approximately, and repeats.
// Throws DescentViolation if the global cost ever rises by more than
// kDescentSlack across an outer iteration.
inline DcoolnetRun run_dcoolnet(const NetworkProblem& pb, std::span<const Vec> x0,
                                const AlgorithmConfig& cfg, ThreadPool* pool = nullptr) {
  validate_problem(pb);
  check_config(cfg);
  detail::check_positions(pb, x0, "run_dcoolnet");
  for (const Vec& xi : x0) {
    if (!all_finite(xi)) throw NonFiniteIterate("run_dcoolnet: initial position not finite");
  }

  const NeighborSets ns = neighbor_sets(pb);
  std::vector<NodeState> states = make_node_states(pb, ns);

  DcoolnetRun run;
  std::vector<Vec> x_cur(x0.begin(), x0.end());
  run.iterates.push_back(x_cur);
  for (int l = 0; l < cfg.outer_iters; ++l) {
    run.outer_f.push_back(global_cost(pb, x_cur));
    for (NodeState& s : states) prepare_outer_iteration(s, pb, x_cur, cfg.degeneracy_eps);
    std::vector<Vec> x_next = run_admm_inner(states, pb, cfg, pool, l, x_cur, &run.inner);
    const double f_next = global_cost(pb, x_next);
    if (!std::isfinite(f_next))
      throw NonFiniteIterate("run_dcoolnet: cost not finite after outer iteration " +
                             std::to_string(l));
    if (f_next > run.outer_f.back() + kDescentSlack)
      throw DescentViolation(l, f_next - run.outer_f.back(),
                             "run_dcoolnet: cost rose from " + std::to_string(run.outer_f.back()) +
                                 " to " + std::to_string(f_next) + " at outer iteration " +
                                 std::to_string(l));
    x_cur = std::move(x_next);
    run.iterates.push_back(x_cur);
  }
  run.final_f = global_cost(pb, x_cur);
  run.messages_per_node.reserve(states.size());
  for (const NodeState& s : states) run.messages_per_node.push_back(s.messages_sent);
  return run;
}

// ---- single-source baselines ----

struct MmTrajectory {
  std::vector<Vec> points;
  bool stopped_on_anchor = false;
  int anchor_hit = -1;  // 0-based index into the anchor list
};

// Classic quadratic-majorizer fixed point for one source and fixed anchors:
//   x <- mean_k ( a_k + r_k (x - a_k) / ||x - a_k|| ).
// Undefined when the current point sits on an anchor; starting there throws,
// landing there later stops the trajectory.
inline MmTrajectory run_quadratic_mm_single_source(std::span<const Vec> anchors,
                                                   std::span<const double> ranges, const Vec& x0,
                                                   int iters, double degeneracy_eps = 1e-12) {
  if (anchors.empty() || anchors.size() != ranges.size())
    throw std::invalid_argument(
        "run_quadratic_mm_single_source: need matching, nonempty anchors and ranges");
  MmTrajectory traj;
  traj.points.push_back(x0);
  Vec x = x0;
  const int p = static_cast<int>(x0.size());
  for (int l = 0; l < iters; ++l) {
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      if ((x - anchors[k]).norm() <= degeneracy_eps) {
        if (l == 0)
          throw DegenerateDirection(
              "run_quadratic_mm_single_source: initial point coincides with anchor " +
                  std::to_string(k + 1),
              static_cast<int>(k));
        traj.stopped_on_anchor = true;
        traj.anchor_hit = static_cast<int>(k);
        return traj;
      }
    }
    Vec next = zero_vec(p);
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      Vec diff = x - anchors[k];
      next += anchors[k] + (ranges[k] / diff.norm()) * diff;
    }
    x = next / static_cast<double>(anchors.size());
    traj.points.push_back(x);
  }
  return traj;
}

// The proposed method on the same single-source instance: a one-sensor
// network whose only terms are anchor links. Exercises the full solver stack,
// including its handling of points that cross an anchor (where the quadratic
// baseline above has to bail out).
inline MmTrajectory run_proposed_mm_single_source(std::span<const Vec> anchors,
                                                  std::span<const double> ranges, const Vec& x0,
                                                  int iters, const AlgorithmConfig& cfg) {
  if (anchors.empty() || anchors.size() != ranges.size())
    throw std::invalid_argument(
        "run_proposed_mm_single_source: need matching, nonempty anchors and ranges");
  ProblemBuilder builder(static_cast<int>(x0.size()), 1);
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const int id = builder.add_anchor(anchors[k]);
    builder.add_anchor_measurement(1, id, ranges[k]);
  }
  AlgorithmConfig run_cfg = cfg;
  run_cfg.outer_iters = iters;
  const NetworkProblem pb = builder.build();
  std::vector<Vec> x0s{x0};
  DcoolnetRun run = run_dcoolnet(pb, x0s, run_cfg);
  MmTrajectory traj;
  traj.points.reserve(run.iterates.size());
  for (const auto& xs : run.iterates) traj.points.push_back(xs[0]);
  return traj;
}

}  // namespace dcool
