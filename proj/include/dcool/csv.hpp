#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "dcool/errors.hpp"
#include "dcool/metrics.hpp"
#include "dcool/simulator.hpp"

namespace dcool {

// Shortest round-trippable decimal form (17 significant digits).
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline constexpr const char* kTraceHeader = "l,t,f,F_surrogate,max_residual,messages_cumulative";

inline std::string trace_csv(const DcoolnetRun& run) {
  std::string out = kTraceHeader;
  out += "\n";
  for (const InnerTraceRow& r : run.inner) {
    out += std::to_string(r.l) + "," + std::to_string(r.t) + "," + format_g17(r.f) + "," +
           format_g17(r.surrogate) + "," + format_g17(r.max_residual) + "," +
           std::to_string(r.messages_cumulative) + "\n";
  }
  return out;
}

inline constexpr const char* kMetricsHeader =
    "algorithm,p,n_sensors,n_anchors,side,comm_range,anchor_mode,sigma,sigma_init,"
    "mc_trials,seed,rho,outer_iters,inner_iters,rmse,se_dispersion,mean_messages,"
    "mean_final_cost";

inline std::string metrics_csv_row(Algorithm alg, const ScenarioConfig& sc,
                                   const AlgorithmConfig& cfg, const MetricsTable& table) {
  std::string out;
  out += to_string(alg);
  out += "," + std::to_string(sc.p);
  out += "," + std::to_string(sc.n_sensors);
  out += "," + std::to_string(sc.n_anchors);
  out += "," + format_g17(sc.side);
  out += "," + format_g17(sc.comm_range);
  out += std::string(",") + to_string(sc.anchor_mode);
  out += "," + format_g17(sc.sigma);
  out += "," + format_g17(sc.sigma_init);
  out += "," + std::to_string(sc.mc_trials);
  out += "," + std::to_string(sc.seed);
  out += "," + format_g17(cfg.rho);
  out += "," + std::to_string(cfg.outer_iters);
  out += "," + std::to_string(cfg.inner_iters);
  out += "," + format_g17(table.rmse);
  out += "," + format_g17(table.se_dispersion);
  out += "," + format_g17(table.mean_messages);
  out += "," + format_g17(table.mean_final_cost);
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace dcool
