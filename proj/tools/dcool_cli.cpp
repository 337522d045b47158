// Command-line front end: scenario generation, problem validation, single
// trial runs with trace output, and Monte Carlo parameter sweeps.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcool/dcool.hpp"
#include "dcool/problem_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct CliOptions {
  dcool::ScenarioConfig scenario;
  dcool::AlgorithmConfig algo;
  std::string anchor_mode = "corners";
};

void apply_known_keys(const nlohmann::json& j, const char* section,
                      const std::vector<const char*>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || (it.key() == a);
    if (!known)
      throw dcool::ProblemFormatError(std::string("config: unknown key \"") + it.key() +
                                      "\" in section \"" + section + "\"");
  }
}

void load_config_file(const std::string& path, CliOptions& opt) {
  std::ifstream in(path);
  if (!in) throw dcool::ProblemFormatError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw dcool::ProblemFormatError("cannot parse config " + path + ": " + e.what());
  }
  apply_known_keys(j, "top level", {"scenario", "algorithm"});
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    apply_known_keys(s, "scenario",
                     {"p", "n_sensors", "n_anchors", "side", "comm_range", "anchor_mode",
                      "sigma", "sigma_init", "mc_trials", "seed"});
    auto& sc = opt.scenario;
    if (s.contains("p")) sc.p = s["p"].get<int>();
    if (s.contains("n_sensors")) sc.n_sensors = s["n_sensors"].get<int>();
    if (s.contains("n_anchors")) sc.n_anchors = s["n_anchors"].get<int>();
    if (s.contains("side")) sc.side = s["side"].get<double>();
    if (s.contains("comm_range")) sc.comm_range = s["comm_range"].get<double>();
    if (s.contains("anchor_mode")) opt.anchor_mode = s["anchor_mode"].get<std::string>();
    if (s.contains("sigma")) sc.sigma = s["sigma"].get<double>();
    if (s.contains("sigma_init")) sc.sigma_init = s["sigma_init"].get<double>();
    if (s.contains("mc_trials")) sc.mc_trials = s["mc_trials"].get<int>();
    if (s.contains("seed")) sc.seed = s["seed"].get<std::uint64_t>();
  }
  if (j.contains("algorithm")) {
    const auto& a = j["algorithm"];
    apply_known_keys(a, "algorithm",
                     {"rho", "outer_iters", "inner_iters", "nesterov_tol", "nesterov_max_iters",
                      "bisection_tol", "degeneracy_eps", "residual_early_exit",
                      "residual_exit_tol", "workers"});
    auto& al = opt.algo;
    if (a.contains("rho")) al.rho = a["rho"].get<double>();
    if (a.contains("outer_iters")) al.outer_iters = a["outer_iters"].get<int>();
    if (a.contains("inner_iters")) al.inner_iters = a["inner_iters"].get<int>();
    if (a.contains("nesterov_tol")) al.nesterov_tol = a["nesterov_tol"].get<double>();
    if (a.contains("nesterov_max_iters")) al.nesterov_max_iters = a["nesterov_max_iters"].get<int>();
    if (a.contains("bisection_tol")) al.bisection_tol = a["bisection_tol"].get<double>();
    if (a.contains("degeneracy_eps")) al.degeneracy_eps = a["degeneracy_eps"].get<double>();
    if (a.contains("residual_early_exit"))
      al.residual_early_exit = a["residual_early_exit"].get<bool>();
    if (a.contains("residual_exit_tol")) al.residual_exit_tol = a["residual_exit_tol"].get<double>();
    if (a.contains("workers")) al.workers = a["workers"].get<int>();
  }
}

void add_scenario_flags(CLI::App* app, CliOptions& opt) {
  auto& sc = opt.scenario;
  app->add_option("--p", sc.p, "ambient dimension (2 or 3)");
  app->add_option("-n,--sensors", sc.n_sensors, "number of sensors");
  app->add_option("-a,--anchors", sc.n_anchors, "number of anchors");
  app->add_option("--side", sc.side, "side length of the deployment region");
  app->add_option("-r,--range", sc.comm_range, "communication range");
  app->add_option("--anchor-mode", opt.anchor_mode, "anchor placement: corners|random");
  app->add_option("--sigma", sc.sigma, "multiplicative range-noise scale");
  app->add_option("--sigma-init", sc.sigma_init, "additive init-noise scale");
  app->add_option("--mc", sc.mc_trials, "Monte Carlo trials");
  app->add_option("--seed", sc.seed, "master seed");
}

void add_algo_flags(CLI::App* app, dcool::AlgorithmConfig& al) {
  app->add_option("--rho", al.rho, "consensus penalty");
  app->add_option("-L,--outer", al.outer_iters, "outer iterations (surrogate refreshes)");
  app->add_option("-T,--inner", al.inner_iters, "rounds per outer iteration");
  app->add_option("--nesterov-tol", al.nesterov_tol, "gradient norm tolerance of inner solves");
  app->add_option("--nesterov-max-iters", al.nesterov_max_iters, "iteration cap of inner solves");
  app->add_option("--bisection-tol", al.bisection_tol, "dual bisection interval tolerance");
  app->add_option("--workers", al.workers, "worker threads for node/trial execution");
  app->add_flag("--residual-early-exit", al.residual_early_exit,
                "stop rounds early once the consensus residual is small");
  app->add_option("--residual-exit-tol", al.residual_exit_tol,
                  "residual threshold for --residual-early-exit");
}

dcool::AnchorMode parse_anchor_mode(const std::string& s) {
  if (s == "corners") return dcool::AnchorMode::Corners;
  if (s == "random") return dcool::AnchorMode::Random;
  throw std::invalid_argument("unknown anchor mode: " + s + " (expected corners|random)");
}

dcool::Algorithm parse_algorithm(const std::string& s) {
  if (s == "dcoolnet") return dcool::Algorithm::Dcoolnet;
  if (s == "quad-mm") return dcool::Algorithm::QuadMmSingle;
  if (s == "proposed-mm") return dcool::Algorithm::ProposedMmSingle;
  throw std::invalid_argument("unknown algorithm: " + s + " (expected dcoolnet|quad-mm|proposed-mm)");
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + csv);
  return out;
}

int cmd_gen(const CliOptions& opt, const std::string& out_path, const std::string& truth_path,
            int trial) {
  using namespace dcool;
  RngStream placement(opt.scenario.seed, kPlacementTag, trial);
  Scenario scn = generate_scenario(opt.scenario, placement);
  RngStream meas(opt.scenario.seed, kMeasurementNoiseTag, trial);
  apply_measurement_noise(scn.problem, scn.true_positions, opt.scenario.sigma, meas);
  save_problem(scn.problem, out_path);
  if (!truth_path.empty()) {
    nlohmann::ordered_json t = nlohmann::ordered_json::array();
    for (const Vec& x : scn.true_positions) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < x.size(); ++c) row.push_back(x[c]);
      t.push_back(row);
    }
    write_text_file(truth_path, t.dump(2) + "\n");
  }
  std::printf("wrote %s: %d sensors, %d anchors, %zu edges, %zu anchor links\n",
              out_path.c_str(), scn.problem.n_sensors, scn.problem.n_anchors(),
              scn.problem.edges.size(), scn.problem.anchor_links.size());
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  using namespace dcool;
  NetworkProblem pb = load_problem(path);
  ValidationReport rep = check_problem(pb);
  std::printf("%s: %s\n", path.c_str(), rep.to_string().c_str());
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_run(const CliOptions& opt, const std::string& algorithm, int trial,
            const std::string& trace_path, const std::string& problem_path) {
  using namespace dcool;
  std::unique_ptr<ThreadPool> pool;
  if (opt.algo.workers > 1) pool = std::make_unique<ThreadPool>(opt.algo.workers);

  if (!problem_path.empty()) {
    // explicit problem file: initial positions drawn uniformly over the
    // anchor bounding box (the deployment region is unknown here)
    NetworkProblem pb = load_problem(problem_path);
    validate_problem(pb);
    Vec lo = zero_vec(pb.p), hi = zero_vec(pb.p);
    if (!pb.anchors.empty()) {
      lo = hi = pb.anchors[0];
      for (const Vec& a : pb.anchors)
        for (int c = 0; c < pb.p; ++c) {
          lo[c] = std::min(lo[c], a[c]);
          hi[c] = std::max(hi[c], a[c]);
        }
    } else {
      for (int c = 0; c < pb.p; ++c) hi[c] = 1.0;
    }
    RngStream init(opt.scenario.seed, kInitNoiseTag, trial);
    std::vector<Vec> x0(pb.n_sensors);
    for (int i = 0; i < pb.n_sensors; ++i) {
      x0[i] = Vec(pb.p);
      for (int c = 0; c < pb.p; ++c) x0[i][c] = init.uniform(lo[c], hi[c]);
    }
    DcoolnetRun run = run_dcoolnet(pb, x0, opt.algo, pool.get());
    if (!trace_path.empty()) write_text_file(trace_path, trace_csv(run));
    std::printf("f(x0)=%s  f(final)=%s  messages=%ld\n",
                format_g17(run.outer_f.empty() ? run.final_f : run.outer_f[0]).c_str(),
                format_g17(run.final_f).c_str(),
                std::accumulate(run.messages_per_node.begin(), run.messages_per_node.end(), 0L));
    return kExitOk;
  }

  const Algorithm alg = parse_algorithm(algorithm);
  if (alg == Algorithm::Dcoolnet) {
    RngStream placement(opt.scenario.seed, kPlacementTag, trial);
    Scenario scn = generate_scenario(opt.scenario, placement);
    RngStream meas(opt.scenario.seed, kMeasurementNoiseTag, trial);
    apply_measurement_noise(scn.problem, scn.true_positions, opt.scenario.sigma, meas);
    RngStream init(opt.scenario.seed, kInitNoiseTag, trial);
    std::vector<Vec> x0 = apply_init_noise(scn.true_positions, opt.scenario.sigma_init, init);
    DcoolnetRun run = run_dcoolnet(scn.problem, x0, opt.algo, pool.get());
    if (!trace_path.empty()) write_text_file(trace_path, trace_csv(run));
    double se = 0.0;
    for (int i = 0; i < scn.problem.n_sensors; ++i)
      se += (run.iterates.back()[i] - scn.true_positions[i]).squaredNorm();
    std::printf("trial %d: f(x0)=%s  f(final)=%s  SE=%s  messages=%ld\n", trial,
                format_g17(run.outer_f.empty() ? run.final_f : run.outer_f[0]).c_str(),
                format_g17(run.final_f).c_str(), format_g17(se).c_str(),
                std::accumulate(run.messages_per_node.begin(), run.messages_per_node.end(), 0L));
  } else {
    TrialResult tr = run_single_trial(opt.scenario, opt.algo, alg, trial);
    std::printf("trial %d (%s): f(final)=%s  SE=%s\n", trial, algorithm.c_str(),
                format_g17(tr.final_cost).c_str(), format_g17(tr.se).c_str());
  }
  return kExitOk;
}

int cmd_sweep(const CliOptions& opt, const std::string& algorithms, const std::string& sigmas,
              const std::string& sigma_inits, const std::string& rhos,
              const std::string& out_path) {
  using namespace dcool;
  std::vector<Algorithm> algs;
  {
    std::size_t pos = 0;
    while (pos < algorithms.size()) {
      std::size_t next = algorithms.find(',', pos);
      if (next == std::string::npos) next = algorithms.size();
      algs.push_back(parse_algorithm(algorithms.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  const std::vector<double> sigma_list =
      sigmas.empty() ? std::vector<double>{opt.scenario.sigma} : parse_list(sigmas);
  const std::vector<double> init_list =
      sigma_inits.empty() ? std::vector<double>{opt.scenario.sigma_init} : parse_list(sigma_inits);
  const std::vector<double> rho_list =
      rhos.empty() ? std::vector<double>{opt.algo.rho} : parse_list(rhos);

  std::unique_ptr<ThreadPool> pool;
  if (opt.algo.workers > 1) pool = std::make_unique<ThreadPool>(opt.algo.workers);

  std::string csv = kMetricsHeader;
  csv += "\n";
  for (const Algorithm alg : algs) {
    for (const double sg : sigma_list) {
      for (const double si : init_list) {
        for (const double rho : rho_list) {
          ScenarioConfig sc = opt.scenario;
          sc.sigma = sg;
          sc.sigma_init = si;
          AlgorithmConfig al = opt.algo;
          al.rho = rho;
          MetricsTable table = run_monte_carlo(sc, al, alg, pool.get());
          csv += metrics_csv_row(alg, sc, al, table) + "\n";
          std::printf("%s sigma=%g sigma_init=%g rho=%g: rmse=%s\n", to_string(alg), sg, si,
                      rho, format_g17(table.rmse).c_str());
        }
      }
    }
  }
  if (!out_path.empty()) write_text_file(out_path, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions opt;

  // Pre-scan for --config so that file values become defaults that explicit
  // flags then override.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) load_config_file(argv[i + 1], opt);
      else if (a.rfind("--config=", 0) == 0) load_config_file(a.substr(9), opt);
    }
    opt.scenario.anchor_mode = parse_anchor_mode(opt.anchor_mode);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }

  CLI::App app{"dcool: distributed range-based network localization"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file with scenario/algorithm sections")
      ->check(CLI::ExistingFile);

  std::string out_path, truth_path, trace_path, problem_path;
  std::string algorithm = "dcoolnet";
  std::string sweep_algorithms = "dcoolnet";
  std::string sigmas, sigma_inits, rhos;
  int trial = 0;

  CLI::App* gen = app.add_subcommand("gen", "generate a scenario and write the problem file");
  gen->fallthrough();
  add_scenario_flags(gen, opt);
  gen->add_option("-o,--out", out_path, "output problem JSON")->required();
  gen->add_option("--truth-out", truth_path, "also write ground-truth positions");
  gen->add_option("--trial", trial, "trial index within the seed's stream");

  CLI::App* validate = app.add_subcommand("validate", "validate a problem file");
  validate->fallthrough();
  validate->add_option("-p,--problem", problem_path, "problem JSON")->required();

  CLI::App* run = app.add_subcommand("run", "run one trial and write its trace");
  run->fallthrough();
  add_scenario_flags(run, opt);
  add_algo_flags(run, opt.algo);
  run->add_option("--algorithm", algorithm, "dcoolnet|quad-mm|proposed-mm");
  run->add_option("--trial", trial, "trial index");
  run->add_option("--trace", trace_path, "output trace CSV");
  run->add_option("--problem", problem_path, "run on an explicit problem file instead");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo grid, one metrics row per point");
  sweep->fallthrough();
  add_scenario_flags(sweep, opt);
  add_algo_flags(sweep, opt.algo);
  sweep->add_option("--algorithms", sweep_algorithms, "comma list of algorithms");
  sweep->add_option("--sigmas", sigmas, "comma list of sigma values");
  sweep->add_option("--sigma-inits", sigma_inits, "comma list of sigma_init values");
  sweep->add_option("--rhos", rhos, "comma list of rho values");
  sweep->add_option("-o,--out", out_path, "output metrics CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    opt.scenario.anchor_mode = parse_anchor_mode(opt.anchor_mode);
    if (gen->parsed()) return cmd_gen(opt, out_path, truth_path, trial);
    if (validate->parsed()) return cmd_validate(problem_path);
    if (run->parsed()) return cmd_run(opt, algorithm, trial, trace_path, problem_path);
    if (sweep->parsed())
      return cmd_sweep(opt, sweep_algorithms, sigmas, sigma_inits, rhos, out_path);
  } catch (const dcool::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const dcool::ProblemFormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return kExitValidation;
  } catch (const dcool::Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
