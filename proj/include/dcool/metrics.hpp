#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "dcool/errors.hpp"
#include "dcool/parallel.hpp"
#include "dcool/scenario.hpp"
#include "dcool/simulator.hpp"

namespace dcool {

enum class Algorithm { Dcoolnet, QuadMmSingle, ProposedMmSingle };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Dcoolnet: return "dcoolnet";
    case Algorithm::QuadMmSingle: return "quad-mm";
    case Algorithm::ProposedMmSingle: return "proposed-mm";
  }
  return "?";
}

struct TrialResult {
  int trial_index = 0;
  std::vector<Vec> x_hat;
  double se = 0.0;  // network-wide squared error against ground truth
  std::vector<double> cost_trace;  // global cost at the start of each outer iteration
  double final_cost = 0.0;
  long message_total = 0;
};

struct MetricsTable {
  double rmse = 0.0;
  double se_dispersion = 0.0;
  double mean_messages = 0.0;
  double mean_final_cost = 0.0;
  std::vector<double> mean_cost_trace;
  std::vector<TrialResult> trials;
};

// Root mean squared error per sensor: total squared error over all trials,
// divided by (sensors * trials), square root.
inline double rmse(std::span<const TrialResult> trials, int n_sensors) {
  if (trials.empty()) throw EmptyTrialSet("rmse: no trials");
  double total = 0.0;
  for (const TrialResult& t : trials) total += t.se;
  return std::sqrt(total / (static_cast<double>(n_sensors) * trials.size()));
}

// Population standard deviation of per-trial squared errors; a single trial
// reports zero spread.
inline double se_dispersion(std::span<const TrialResult> trials) {
  if (trials.empty()) throw EmptyTrialSet("se_dispersion: no trials");
  double mean = 0.0;
  for (const TrialResult& t : trials) mean += t.se;
  mean /= trials.size();
  double var = 0.0;
  for (const TrialResult& t : trials) var += (t.se - mean) * (t.se - mean);
  return std::sqrt(var / trials.size());
}

namespace detail {

inline void extract_single_source(const NetworkProblem& pb, std::vector<Vec>& anchors,
                                  std::vector<double>& ranges) {
  for (const AnchorLink& l : pb.anchor_links) {
    anchors.push_back(pb.anchors[l.anchor - 1]);
    ranges.push_back(l.r);
  }
}

// Cost trace of a single-source trajectory, padded to `iters` entries when
// the trajectory stopped early.
inline std::vector<double> trajectory_costs(const NetworkProblem& pb, const MmTrajectory& traj,
                                            int iters) {
  std::vector<double> costs;
  std::vector<Vec> point(1);
  for (int l = 0; l < iters; ++l) {
    const auto& pts = traj.points;
    point[0] = pts[std::min<std::size_t>(l, pts.size() - 1)];
    costs.push_back(global_cost(pb, point));
  }
  return costs;
}

}  // namespace detail

// Runs one Monte Carlo trial: draw a fresh network, apply measurement and
// initialization noise from trial-indexed substreams, run the requested
// algorithm. The single-source baselines require a one-sensor scenario.
inline TrialResult run_single_trial(const ScenarioConfig& sc, const AlgorithmConfig& cfg,
                                    Algorithm alg, int trial) {
  RngStream placement(sc.seed, kPlacementTag, static_cast<std::uint64_t>(trial));
  Scenario scn = generate_scenario(sc, placement);
  RngStream meas(sc.seed, kMeasurementNoiseTag, static_cast<std::uint64_t>(trial));
  apply_measurement_noise(scn.problem, scn.true_positions, sc.sigma, meas);
  RngStream init(sc.seed, kInitNoiseTag, static_cast<std::uint64_t>(trial));
  std::vector<Vec> x0 = apply_init_noise(scn.true_positions, sc.sigma_init, init);

  TrialResult tr;
  tr.trial_index = trial;
  if (alg == Algorithm::Dcoolnet) {
    DcoolnetRun run = run_dcoolnet(scn.problem, x0, cfg);
    tr.x_hat = run.iterates.back();
    tr.cost_trace = run.outer_f;
    tr.final_cost = run.final_f;
    tr.message_total = std::accumulate(run.messages_per_node.begin(),
                                       run.messages_per_node.end(), 0L);
  } else {
    if (sc.n_sensors != 1)
      throw std::invalid_argument("single-source baselines require a one-sensor scenario");
    std::vector<Vec> anchors;
    std::vector<double> ranges;
    detail::extract_single_source(scn.problem, anchors, ranges);
    MmTrajectory traj =
        alg == Algorithm::QuadMmSingle
            ? run_quadratic_mm_single_source(anchors, ranges, x0[0], cfg.outer_iters,
                                             cfg.degeneracy_eps)
            : run_proposed_mm_single_source(anchors, ranges, x0[0], cfg.outer_iters, cfg);
    tr.x_hat = {traj.points.back()};
    tr.cost_trace = detail::trajectory_costs(scn.problem, traj, cfg.outer_iters);
    std::vector<Vec> last(1, traj.points.back());
    tr.final_cost = global_cost(scn.problem, last);
    tr.message_total = 0;
  }
  for (std::size_t i = 0; i < tr.x_hat.size(); ++i)
    tr.se += (tr.x_hat[i] - scn.true_positions[i]).squaredNorm();
  return tr;
}

// Monte Carlo sweep over mc_trials independent trials. Trials may execute on
// a pool; results land in trial-indexed slots and every aggregate is reduced
// sequentially in index order, so the output is identical however the trials
// were scheduled.
inline MetricsTable run_monte_carlo(const ScenarioConfig& sc, const AlgorithmConfig& cfg,
                                    Algorithm alg, ThreadPool* pool = nullptr) {
  check_scenario(sc);
  check_config(cfg);
  MetricsTable table;
  table.trials.resize(sc.mc_trials);
  auto body = [&](int m) { table.trials[m] = run_single_trial(sc, cfg, alg, m); };
  if (pool)
    pool->parallel_for(sc.mc_trials, body);
  else
    for (int m = 0; m < sc.mc_trials; ++m) body(m);

  table.rmse = rmse(table.trials, sc.n_sensors);
  table.se_dispersion = se_dispersion(table.trials);
  double msg = 0.0, fc = 0.0;
  for (const TrialResult& t : table.trials) {
    msg += static_cast<double>(t.message_total);
    fc += t.final_cost;
  }
  table.mean_messages = msg / sc.mc_trials;
  table.mean_final_cost = fc / sc.mc_trials;
  if (!table.trials.empty() && !table.trials.front().cost_trace.empty()) {
    const std::size_t len = table.trials.front().cost_trace.size();
    table.mean_cost_trace.assign(len, 0.0);
    for (const TrialResult& t : table.trials) {
      for (std::size_t l = 0; l < len && l < t.cost_trace.size(); ++l)
        table.mean_cost_trace[l] += t.cost_trace[l];
    }
    for (double& v : table.mean_cost_trace) v /= sc.mc_trials;
  }
  return table;
}

}  // namespace dcool
