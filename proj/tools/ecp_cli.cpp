#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ecp/ecp.h"
#include "json.hpp"

namespace {

struct InstanceDeleter {
  void operator()(ecp_instance* p) const { ecp_instance_destroy(p); }
};
struct ConfigDeleter {
  void operator()(ecp_config* p) const { ecp_config_destroy(p); }
};
struct ResultDeleter {
  void operator()(ecp_result* p) const { ecp_result_destroy(p); }
};
struct PlacementDeleter {
  void operator()(ecp_placement* p) const { ecp_placement_destroy(p); }
};
struct PhaseDeleter {
  void operator()(ecp_phase_result* p) const { ecp_phase_destroy(p); }
};
using InstancePtr = std::unique_ptr<ecp_instance, InstanceDeleter>;
using ConfigPtr = std::unique_ptr<ecp_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<ecp_result, ResultDeleter>;
using PlacementPtr = std::unique_ptr<ecp_placement, PlacementDeleter>;
using PhasePtr = std::unique_ptr<ecp_phase_result, PhaseDeleter>;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

int exit_code_for(ecp_status status) { return status == ECP_ERROR_INFEASIBLE ? 1 : 2; }

int report(ecp_status status, const std::string& what) {
  std::cerr << "error: " << what << ": " << ecp_last_error_message() << "\n";
  return exit_code_for(status);
}

struct GenOptions {
  int clusters = 1;
  int size = 0;
  int dimension = 2;
  uint64_t seed = 0;
  double spread = 0.5;
  double box_low = 0.0;
  double box_high = 10.0;
  double gamma = 0.1;
  std::string out;
};

struct ConfigOptions {
  double t_max = 0.0;
  double t_min = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double perturb = 0.0;
  double merge_tol = -1.0;
  int k_max = 0;
  int max_iters = 0;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("--t-max", o.t_max, "Initial temperature (0 = auto)");
  cmd->add_option("--t-min", o.t_min, "Final temperature (0 = auto)");
  cmd->add_option("--alpha", o.alpha, "Cooling factor in (0,1) (0 = auto)");
  cmd->add_option("--k-max", o.k_max, "Centroid budget (0 = auto)");
  cmd->add_option("--delta", o.delta, "Free-energy convergence threshold (0 = auto)");
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap per temperature (0 = auto)");
  cmd->add_option("--perturb", o.perturb, "Split perturbation scale (0 = auto)");
  cmd->add_option("--merge-tol", o.merge_tol, "Coincident-centroid tolerance (negative = auto)");
}

ConfigPtr build_config(const ConfigOptions& o) {
  ecp_config* cfg = nullptr;
  ecp_config_create(&cfg);
  ecp_config_set_temperature_range(cfg, o.t_max, o.t_min);
  ecp_config_set_cooling(cfg, o.alpha);
  ecp_config_set_max_controllers(cfg, o.k_max);
  ecp_config_set_convergence(cfg, o.delta, o.max_iters);
  ecp_config_set_perturbation(cfg, o.perturb);
  ecp_config_set_merge_tolerance(cfg, o.merge_tol);
  return ConfigPtr(cfg);
}

ecp_status load_instance(const std::string& path, InstancePtr* out) {
  ecp_instance* raw = nullptr;
  const ecp_status st = ecp_instance_load(path.c_str(), &raw);
  if (st == ECP_OK) out->reset(raw);
  return st;
}

ecp_status run_solver(const std::string& solver, const ecp_instance* inst, const ecp_config* cfg,
                      uint64_t seed, ResultPtr* out) {
  ecp_result* raw = nullptr;
  const ecp_status st = solver == "ll" ? ecp_solve_leaderless(inst, cfg, seed, &raw)
                                       : ecp_solve_leader_based(inst, cfg, seed, &raw);
  if (st == ECP_OK) out->reset(raw);
  return st;
}

nlohmann::json result_to_json(const ecp_result* res) {
  nlohmann::json j;
  std::vector<int> controllers(static_cast<size_t>(ecp_result_controller_count(res)));
  ecp_result_controllers(res, controllers.data());
  std::vector<int> assignment(static_cast<size_t>(ecp_result_assignment_length(res)));
  ecp_result_assignment(res, assignment.data());
  int leader = -1;
  ecp_result_leader(res, &leader);
  double delay = 0, sync = 0, total = 0, soft = 0;
  ecp_result_objective(res, &delay, &sync, &total);
  ecp_result_soft_objective(res, &soft);
  j["controllers"] = controllers;
  j["assignment"] = assignment;
  if (leader >= 0)
    j["leader"] = leader;
  else
    j["leader"] = nullptr;
  j["objective"] = {{"delay_cost", delay}, {"sync_cost", sync}, {"total", total}};
  j["soft_objective"] = soft;
  j["trace_rows"] = ecp_result_trace_length(res);
  return j;
}

void print_result_text(const ecp_result* res) {
  const nlohmann::json j = result_to_json(res);
  std::cout << "controllers:";
  for (int c : j["controllers"].get<std::vector<int>>()) std::cout << ' ' << c;
  std::cout << "\n";
  if (!j["leader"].is_null()) std::cout << "leader: " << j["leader"].get<int>() << "\n";
  std::cout << "delay_cost: " << fmt(j["objective"]["delay_cost"].get<double>()) << "\n"
            << "sync_cost: " << fmt(j["objective"]["sync_cost"].get<double>()) << "\n"
            << "total: " << fmt(j["objective"]["total"].get<double>()) << "\n"
            << "soft_objective: " << fmt(j["soft_objective"].get<double>()) << "\n"
            << "trace_rows: " << j["trace_rows"].get<long long>() << "\n";
}

int cmd_gen(const GenOptions& o) {
  ecp_instance* raw = nullptr;
  ecp_status st = ecp_instance_generate(o.clusters, o.size, o.dimension, o.seed, o.spread,
                                        o.box_low, o.box_high, o.gamma, &raw);
  if (st != ECP_OK) return report(st, "generate");
  InstancePtr inst(raw);
  st = ecp_instance_save(inst.get(), o.out.c_str());
  if (st != ECP_OK) return report(st, "save " + o.out);
  std::cout << "wrote " << o.out << " (" << ecp_instance_size(inst.get()) << " nodes, dimension "
            << ecp_instance_dimension(inst.get()) << ", gamma "
            << fmt(ecp_instance_gamma(inst.get())) << ")\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& solver, uint64_t seed,
              const ConfigOptions& copts, const std::string& out, const std::string& trace,
              const std::string& format) {
  InstancePtr inst;
  ecp_status st = load_instance(instance_path, &inst);
  if (st != ECP_OK) return report(st, "load " + instance_path);
  const ConfigPtr cfg = build_config(copts);
  ResultPtr res;
  st = run_solver(solver, inst.get(), cfg.get(), seed, &res);
  if (st != ECP_OK) return report(st, "solve");
  if (!out.empty()) {
    st = ecp_result_save_placement(res.get(), out.c_str());
    if (st != ECP_OK) return report(st, "save " + out);
  }
  if (!trace.empty()) {
    st = ecp_result_save_trace(res.get(), trace.c_str());
    if (st != ECP_OK) return report(st, "save " + trace);
  }
  if (format == "json")
    std::cout << result_to_json(res.get()).dump(2) << "\n";
  else
    print_result_text(res.get());
  return 0;
}

int cmd_oracle(const std::string& instance_path, const std::string& solver, int max_controllers,
               const std::string& out, const std::string& format) {
  InstancePtr inst;
  ecp_status st = load_instance(instance_path, &inst);
  if (st != ECP_OK) return report(st, "load " + instance_path);
  ecp_placement* raw = nullptr;
  long long subsets = 0;
  st = solver == "ll" ? ecp_oracle_leaderless(inst.get(), max_controllers, &raw, &subsets)
                      : ecp_oracle_leader_based(inst.get(), max_controllers, &raw, &subsets);
  if (st != ECP_OK) return report(st, "oracle");
  PlacementPtr pl(raw);
  if (!out.empty()) {
    st = ecp_placement_save(pl.get(), out.c_str());
    if (st != ECP_OK) return report(st, "save " + out);
  }
  std::vector<int> controllers(static_cast<size_t>(ecp_placement_controller_count(pl.get())));
  ecp_placement_controllers(pl.get(), controllers.data());
  int leader = -1;
  ecp_placement_leader(pl.get(), &leader);
  double delay = 0, sync = 0, total = 0;
  ecp_placement_objective(pl.get(), &delay, &sync, &total);
  if (format == "json") {
    nlohmann::json j;
    j["controllers"] = controllers;
    if (leader >= 0)
      j["leader"] = leader;
    else
      j["leader"] = nullptr;
    j["objective"] = {{"delay_cost", delay}, {"sync_cost", sync}, {"total", total}};
    j["subsets_enumerated"] = subsets;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "controllers:";
    for (int c : controllers) std::cout << ' ' << c;
    std::cout << "\n";
    if (leader >= 0) std::cout << "leader: " << leader << "\n";
    std::cout << "delay_cost: " << fmt(delay) << "\nsync_cost: " << fmt(sync)
              << "\ntotal: " << fmt(total) << "\nsubsets_enumerated: " << subsets << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& instance_path, const std::string& solver,
              std::vector<double> gammas, uint64_t seed, const ConfigOptions& copts, int jobs,
              const std::string& out) {
  InstancePtr inst;
  ecp_status st = load_instance(instance_path, &inst);
  if (st != ECP_OK) return report(st, "load " + instance_path);
  const ConfigPtr cfg = build_config(copts);

  struct Row {
    double gamma = 0.0;
    double objective = 0.0;
    int controllers = 0;
    double wall_time = 0.0;
    ecp_status status = ECP_OK;
    std::string error;
  };
  std::vector<Row> rows(gammas.size());
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= gammas.size()) return;
      Row& row = rows[idx];
      row.gamma = gammas[idx];
      ecp_instance* clone_raw = nullptr;
      ecp_status ws = ecp_instance_clone(inst.get(), &clone_raw);
      if (ws != ECP_OK) {
        row.status = ws;
        row.error = ecp_last_error_message();
        continue;
      }
      InstancePtr clone(clone_raw);
      ws = ecp_instance_set_gamma(clone.get(), gammas[idx]);
      if (ws == ECP_OK) {
        ResultPtr res;
        const auto t0 = std::chrono::steady_clock::now();
        ws = run_solver(solver, clone.get(), cfg.get(), seed, &res);
        const auto t1 = std::chrono::steady_clock::now();
        if (ws == ECP_OK) {
          row.wall_time = std::chrono::duration<double>(t1 - t0).count();
          row.controllers = ecp_result_controller_count(res.get());
          double delay = 0, sync = 0, total = 0;
          ecp_result_objective(res.get(), &delay, &sync, &total);
          row.objective = total;
        }
      }
      if (ws != ECP_OK) {
        row.status = ws;
        row.error = ecp_last_error_message();
      }
    }
  };

  const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(gammas.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const Row& row : rows)
    if (row.status != ECP_OK) {
      std::cerr << "error: sweep at gamma " << fmt(row.gamma) << ": " << row.error << "\n";
      return exit_code_for(row.status);
    }

  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "error: cannot open " << out << " for writing\n";
    return 2;
  }
  csv << "value,objective,controllers,wall_time\n";
  for (const Row& row : rows)
    csv << fmt(row.gamma) << ',' << fmt(row.objective) << ',' << row.controllers << ','
        << fmt(row.wall_time) << '\n';
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  return 0;
}

double fit_r_squared(const std::vector<std::pair<double, double>>& samples) {
  const size_t n = samples.size();
  double mx = 0, my = 0;
  for (const auto& [x, y] : samples) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

int cmd_bench(std::vector<int> sizes, int clusters, int dimension, double gamma, double spread,
              const std::string& solver, uint64_t seed, const ConfigOptions& copts,
              const std::string& out) {
  const ConfigPtr cfg = build_config(copts);
  std::vector<std::string> solvers;
  if (solver == "both")
    solvers = {"ll", "lb"};
  else
    solvers = {solver};

  struct Row {
    int n;
    std::string solver;
    double wall_time;
    double objective;
    int controllers;
  };
  std::vector<Row> rows;
  for (const std::string& s : solvers) {
    std::vector<std::pair<double, double>> samples;
    for (size_t idx = 0; idx < sizes.size(); ++idx) {
      const int n = sizes[idx];
      ecp_instance* raw = nullptr;
      ecp_status st = ecp_instance_generate(clusters, n, dimension, seed + idx, spread, 0.0, 10.0,
                                            gamma, &raw);
      if (st != ECP_OK) return report(st, "generate n=" + std::to_string(n));
      InstancePtr inst(raw);

      ResultPtr warm;
      st = run_solver(s, inst.get(), cfg.get(), seed, &warm);
      if (st != ECP_OK) return report(st, "warmup n=" + std::to_string(n));
      warm.reset();

      ResultPtr res;
      const auto t0 = std::chrono::steady_clock::now();
      st = run_solver(s, inst.get(), cfg.get(), seed, &res);
      const auto t1 = std::chrono::steady_clock::now();
      if (st != ECP_OK) return report(st, "solve n=" + std::to_string(n));
      const double wall = std::chrono::duration<double>(t1 - t0).count();
      double delay = 0, sync = 0, total = 0;
      ecp_result_objective(res.get(), &delay, &sync, &total);
      rows.push_back({n, s, wall, total, ecp_result_controller_count(res.get())});
      samples.emplace_back(static_cast<double>(n), wall);
    }
    if (samples.size() >= 2)
      std::cout << "solver " << s << ": linear R^2 = " << fmt(fit_r_squared(samples)) << "\n";
  }

  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "error: cannot open " << out << " for writing\n";
    return 2;
  }
  csv << "n,clusters,solver,wall_time,objective,controllers\n";
  for (const Row& row : rows)
    csv << row.n << ',' << clusters << ',' << row.solver << ',' << fmt(row.wall_time) << ','
        << fmt(row.objective) << ',' << row.controllers << '\n';
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_phase(const std::string& instance_path, int grid_points, uint64_t seed,
              const ConfigOptions& copts, const std::string& out) {
  InstancePtr inst;
  ecp_status st = load_instance(instance_path, &inst);
  if (st != ECP_OK) return report(st, "load " + instance_path);
  const ConfigPtr cfg = build_config(copts);
  ecp_phase_result* raw = nullptr;
  st = ecp_phase_scan(inst.get(), cfg.get(), grid_points, seed, &raw);
  if (st != ECP_OK) return report(st, "phase scan");
  PhasePtr res(raw);
  if (!out.empty()) {
    st = ecp_phase_save_csv(res.get(), out.c_str());
    if (st != ECP_OK) return report(st, "save " + out);
    std::cout << "wrote " << out << " (" << ecp_phase_point_count(res.get()) << " points)\n";
  }
  const int criticals = ecp_phase_critical_count(res.get());
  std::cout << "critical_temperatures:";
  for (int i = 0; i < criticals; ++i) {
    double t = 0;
    ecp_phase_critical(res.get(), i, &t);
    std::cout << ' ' << fmt(t);
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic-annealing controller placement tools"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* cmd_gen_app = app.add_subcommand("gen", "Generate a Gaussian-blob instance");
  cmd_gen_app->add_option("-n,--size", gen.size, "Node count")->required();
  cmd_gen_app->add_option("-k,--clusters", gen.clusters, "Cluster count");
  cmd_gen_app->add_option("-d,--dimension", gen.dimension, "Coordinate dimension");
  cmd_gen_app->add_option("--seed", gen.seed, "Generator seed");
  cmd_gen_app->add_option("--spread", gen.spread, "Per-coordinate cluster spread");
  cmd_gen_app->add_option("--box-low", gen.box_low, "Center box lower bound");
  cmd_gen_app->add_option("--box-high", gen.box_high, "Center box upper bound");
  cmd_gen_app->add_option("--gamma", gen.gamma, "Synchronization weight");
  cmd_gen_app->add_option("-o,--out", gen.out, "Instance output path")->required();

  std::string solve_instance, solve_solver, solve_out, solve_trace, solve_format = "text";
  uint64_t solve_seed = 0;
  ConfigOptions solve_cfg;
  CLI::App* cmd_solve_app = app.add_subcommand("solve", "Run an annealing solver");
  cmd_solve_app->add_option("-i,--instance", solve_instance, "Instance path")->required();
  cmd_solve_app->add_option("-s,--solver", solve_solver, "Solver: ll or lb")
      ->required()
      ->check(CLI::IsMember({"ll", "lb"}));
  cmd_solve_app->add_option("--seed", solve_seed, "Solver seed");
  cmd_solve_app->add_option("-o,--out", solve_out, "Placement output path");
  cmd_solve_app->add_option("--trace", solve_trace, "Trace CSV output path");
  cmd_solve_app->add_option("--format", solve_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  add_config_options(cmd_solve_app, solve_cfg);

  std::string oracle_instance, oracle_solver, oracle_out, oracle_format = "text";
  int oracle_max = 0;
  CLI::App* cmd_oracle_app = app.add_subcommand("oracle", "Exhaustive exact search");
  cmd_oracle_app->add_option("-i,--instance", oracle_instance, "Instance path")->required();
  cmd_oracle_app->add_option("-s,--solver", oracle_solver, "Objective: ll or lb")
      ->required()
      ->check(CLI::IsMember({"ll", "lb"}));
  cmd_oracle_app->add_option("-m,--max-controllers", oracle_max, "Subset size cap")->required();
  cmd_oracle_app->add_option("-o,--out", oracle_out, "Placement output path");
  cmd_oracle_app->add_option("--format", oracle_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  std::string sweep_instance, sweep_solver, sweep_out;
  std::vector<double> sweep_gammas;
  uint64_t sweep_seed = 0;
  int sweep_jobs = 1;
  ConfigOptions sweep_cfg;
  CLI::App* cmd_sweep_app = app.add_subcommand("sweep", "Solve across a gamma sweep");
  cmd_sweep_app->add_option("-i,--instance", sweep_instance, "Instance path")->required();
  cmd_sweep_app->add_option("-s,--solver", sweep_solver, "Solver: ll or lb")
      ->required()
      ->check(CLI::IsMember({"ll", "lb"}));
  cmd_sweep_app->add_option("--gammas", sweep_gammas, "Comma-separated gamma values")
      ->required()
      ->delimiter(',');
  cmd_sweep_app->add_option("--seed", sweep_seed, "Solver seed");
  cmd_sweep_app->add_option("-j,--jobs", sweep_jobs, "Parallel workers");
  cmd_sweep_app->add_option("-o,--out", sweep_out, "Sweep CSV output path")->required();
  add_config_options(cmd_sweep_app, sweep_cfg);

  std::vector<int> bench_sizes{250, 500, 1000, 2000};
  int bench_clusters = 4, bench_dimension = 2;
  double bench_gamma = 0.1, bench_spread = 0.5;
  std::string bench_solver = "both", bench_out;
  uint64_t bench_seed = 0;
  ConfigOptions bench_cfg;
  bench_cfg.k_max = 4;
  CLI::App* cmd_bench_app = app.add_subcommand("bench", "Scaling benchmark over instance sizes");
  cmd_bench_app->add_option("--sizes", bench_sizes, "Comma-separated node counts")->delimiter(',');
  cmd_bench_app->add_option("-k,--clusters", bench_clusters, "Generated cluster count");
  cmd_bench_app->add_option("-d,--dimension", bench_dimension, "Coordinate dimension");
  cmd_bench_app->add_option("--gamma", bench_gamma, "Synchronization weight");
  cmd_bench_app->add_option("--spread", bench_spread, "Per-coordinate cluster spread");
  cmd_bench_app->add_option("-s,--solver", bench_solver, "Solver: ll, lb or both")
      ->check(CLI::IsMember({"ll", "lb", "both"}));
  cmd_bench_app->add_option("--seed", bench_seed, "Generator and solver seed");
  cmd_bench_app->add_option("-o,--out", bench_out, "Benchmark CSV output path")->required();
  add_config_options(cmd_bench_app, bench_cfg);

  std::string phase_instance, phase_out;
  int phase_grid = 64;
  uint64_t phase_seed = 0;
  ConfigOptions phase_cfg;
  CLI::App* cmd_phase_app = app.add_subcommand("phase", "Critical-temperature scan");
  cmd_phase_app->add_option("-i,--instance", phase_instance, "Instance path")->required();
  cmd_phase_app->add_option("--grid-points", phase_grid, "Temperature grid size");
  cmd_phase_app->add_option("--seed", phase_seed, "Reference run seed");
  cmd_phase_app->add_option("-o,--out", phase_out, "Phase CSV output path");
  add_config_options(cmd_phase_app, phase_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cmd_gen_app->parsed()) return cmd_gen(gen);
  if (cmd_solve_app->parsed())
    return cmd_solve(solve_instance, solve_solver, solve_seed, solve_cfg, solve_out, solve_trace,
                     solve_format);
  if (cmd_oracle_app->parsed())
    return cmd_oracle(oracle_instance, oracle_solver, oracle_max, oracle_out, oracle_format);
  if (cmd_sweep_app->parsed())
    return cmd_sweep(sweep_instance, sweep_solver, sweep_gammas, sweep_seed, sweep_cfg, sweep_jobs,
                     sweep_out);
  if (cmd_bench_app->parsed())
    return cmd_bench(bench_sizes, bench_clusters, bench_dimension, bench_gamma, bench_spread,
                     bench_solver, bench_seed, bench_cfg, bench_out);
  if (cmd_phase_app->parsed())
    return cmd_phase(phase_instance, phase_grid, phase_seed, phase_cfg, phase_out);
  return 2;
}
