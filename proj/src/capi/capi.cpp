#include "ecp/ecp.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "core/annealing.hpp"
#include "core/ecp_lb.hpp"
#include "core/ecp_ll.hpp"
#include "core/network_model.hpp"
#include "core/oracle.hpp"
#include "core/phase.hpp"
#include "core/types.hpp"

struct ecp_instance {
  ecp::NetworkInstance value;
};
struct ecp_config {
  ecp::ScheduleConfig value;
};
struct ecp_result {
  ecp::RunResult value;
};
struct ecp_placement {
  ecp::Placement value;
};
struct ecp_phase_result {
  ecp::PhaseScanResult value;
};

namespace {

thread_local std::string g_last_error;

ecp_status fail(ecp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
ecp_status guarded(F&& body) {
  try {
    return body();
  } catch (const ecp::DegenerateClusterError& e) {
    return fail(ECP_ERROR_DEGENERATE, e.what());
  } catch (const ecp::ValidationError& e) {
    return fail(ECP_ERROR_VALIDATION, e.what());
  } catch (const ecp::IoError& e) {
    return fail(ECP_ERROR_IO, e.what());
  } catch (const ecp::InfeasibleError& e) {
    return fail(ECP_ERROR_INFEASIBLE, e.what());
  } catch (const std::exception& e) {
    return fail(ECP_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(ECP_ERROR_RUNTIME, "unknown error");
  }
}

// Maps a <= 0 sentinel onto "choose automatically".
template <typename T>
std::optional<T> positive_or_auto(T v) {
  if (v > T{0}) return v;
  return std::nullopt;
}

ecp_status solve(const ecp_instance* instance, const ecp_config* config, uint64_t seed,
                 ecp::SolverKind kind, ecp_result** out);

}  // namespace

#define ECP_REQUIRE(cond)                                            \
  do {                                                               \
    if (!(cond)) return fail(ECP_ERROR_NULL_ARGUMENT, "missing required argument: " #cond); \
  } while (0)

extern "C" {

const char* ecp_last_error_message(void) { return g_last_error.c_str(); }

ecp_status ecp_instance_create(int dimension, double gamma, const double* positions,
                               const double* weights, int node_count, const int* candidates,
                               int candidate_count, ecp_instance** out) {
  ECP_REQUIRE(positions);
  ECP_REQUIRE(candidates);
  ECP_REQUIRE(out);
  return guarded([&] {
    if (node_count < 1) throw ecp::ValidationError("instance: node_count must be >= 1");
    if (dimension < 1) throw ecp::ValidationError("instance: dimension must be >= 1");
    if (candidate_count < 1) throw ecp::ValidationError("instance: candidate_count must be >= 1");
    auto handle = std::make_unique<ecp_instance>();
    auto& inst = handle->value;
    inst.dimension = dimension;
    inst.gamma = gamma;
    inst.nodes.resize(static_cast<size_t>(node_count));
    for (int i = 0; i < node_count; ++i) {
      auto& node = inst.nodes[static_cast<size_t>(i)];
      node.position.assign(positions + static_cast<size_t>(i) * dimension,
                           positions + static_cast<size_t>(i + 1) * dimension);
      node.weight = weights ? weights[i] : 1.0 / node_count;
    }
    inst.candidates.assign(candidates, candidates + candidate_count);
    std::sort(inst.candidates.begin(), inst.candidates.end());
    inst.validate();
    *out = handle.release();
    return ECP_OK;
  });
}

ecp_status ecp_instance_generate(int clusters, int size, int dimension, uint64_t seed,
                                 double cluster_spread, double box_low, double box_high,
                                 double gamma, ecp_instance** out) {
  ECP_REQUIRE(out);
  return guarded([&] {
    ecp::GeneratorParams params;
    params.clusters = clusters;
    params.size = size;
    params.dimension = dimension;
    params.seed = seed;
    params.cluster_spread = cluster_spread;
    params.center_box_low = box_low;
    params.center_box_high = box_high;
    params.gamma = gamma;
    auto handle = std::make_unique<ecp_instance>();
    handle->value = ecp::generate_gaussian_instance(params);
    *out = handle.release();
    return ECP_OK;
  });
}

ecp_status ecp_instance_load(const char* path, ecp_instance** out) {
  ECP_REQUIRE(path);
  ECP_REQUIRE(out);
  return guarded([&] {
    auto handle = std::make_unique<ecp_instance>();
    handle->value = ecp::load_instance(path);
    *out = handle.release();
    return ECP_OK;
  });
}

ecp_status ecp_instance_save(const ecp_instance* instance, const char* path) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(path);
  return guarded([&] {
    ecp::save_instance(instance->value, path);
    return ECP_OK;
  });
}

ecp_status ecp_instance_clone(const ecp_instance* instance, ecp_instance** out) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(out);
  return guarded([&] {
    *out = new ecp_instance{instance->value};
    return ECP_OK;
  });
}

ecp_status ecp_instance_set_gamma(ecp_instance* instance, double gamma) {
  ECP_REQUIRE(instance);
  return guarded([&] {
    if (gamma < 0.0) throw ecp::ValidationError("gamma must be >= 0");
    instance->value.gamma = gamma;
    return ECP_OK;
  });
}

int ecp_instance_size(const ecp_instance* instance) {
  return instance ? instance->value.size() : 0;
}

int ecp_instance_dimension(const ecp_instance* instance) {
  return instance ? instance->value.dimension : 0;
}

double ecp_instance_gamma(const ecp_instance* instance) {
  return instance ? instance->value.gamma : 0.0;
}

void ecp_instance_destroy(ecp_instance* instance) { delete instance; }

ecp_status ecp_config_create(ecp_config** out) {
  ECP_REQUIRE(out);
  *out = new ecp_config{};
  return ECP_OK;
}

ecp_status ecp_config_set_temperature_range(ecp_config* config, double t_max, double t_min) {
  ECP_REQUIRE(config);
  config->value.t_max = positive_or_auto(t_max);
  config->value.t_min = positive_or_auto(t_min);
  return ECP_OK;
}

ecp_status ecp_config_set_cooling(ecp_config* config, double alpha) {
  ECP_REQUIRE(config);
  config->value.alpha = positive_or_auto(alpha);
  return ECP_OK;
}

ecp_status ecp_config_set_max_controllers(ecp_config* config, int k_max) {
  ECP_REQUIRE(config);
  config->value.k_max = positive_or_auto(k_max);
  return ECP_OK;
}

ecp_status ecp_config_set_convergence(ecp_config* config, double delta,
                                      int max_iters_per_temperature) {
  ECP_REQUIRE(config);
  config->value.delta = positive_or_auto(delta);
  config->value.max_iters_per_temperature = positive_or_auto(max_iters_per_temperature);
  return ECP_OK;
}

ecp_status ecp_config_set_perturbation(ecp_config* config, double scale) {
  ECP_REQUIRE(config);
  config->value.perturb_scale = positive_or_auto(scale);
  return ECP_OK;
}

ecp_status ecp_config_set_merge_tolerance(ecp_config* config, double tolerance) {
  ECP_REQUIRE(config);
  if (tolerance < 0.0)
    config->value.merge_tolerance = std::nullopt;
  else
    config->value.merge_tolerance = tolerance;
  return ECP_OK;
}

void ecp_config_destroy(ecp_config* config) { delete config; }

ecp_status ecp_solve_leaderless(const ecp_instance* instance, const ecp_config* config,
                                uint64_t seed, ecp_result** out) {
  return solve(instance, config, seed, ecp::SolverKind::LeaderLess, out);
}

ecp_status ecp_solve_leader_based(const ecp_instance* instance, const ecp_config* config,
                                  uint64_t seed, ecp_result** out) {
  return solve(instance, config, seed, ecp::SolverKind::LeaderBased, out);
}

int ecp_result_controller_count(const ecp_result* result) {
  return result ? static_cast<int>(result->value.placement.controllers.size()) : 0;
}

ecp_status ecp_result_controllers(const ecp_result* result, int* buffer) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(buffer);
  const auto& c = result->value.placement.controllers;
  std::copy(c.begin(), c.end(), buffer);
  return ECP_OK;
}

int ecp_result_assignment_length(const ecp_result* result) {
  return result ? static_cast<int>(result->value.placement.assignment.size()) : 0;
}

ecp_status ecp_result_assignment(const ecp_result* result, int* buffer) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(buffer);
  const auto& a = result->value.placement.assignment;
  std::copy(a.begin(), a.end(), buffer);
  return ECP_OK;
}

ecp_status ecp_result_leader(const ecp_result* result, int* out_leader) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(out_leader);
  *out_leader = result->value.placement.leader.value_or(-1);
  return ECP_OK;
}

ecp_status ecp_result_objective(const ecp_result* result, double* delay_cost, double* sync_cost,
                                double* total) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(delay_cost);
  ECP_REQUIRE(sync_cost);
  ECP_REQUIRE(total);
  const auto& obj = result->value.placement.objective;
  *delay_cost = obj.delay_cost;
  *sync_cost = obj.sync_cost;
  *total = obj.total;
  return ECP_OK;
}

ecp_status ecp_result_soft_objective(const ecp_result* result, double* out) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(out);
  *out = result->value.soft_objective;
  return ECP_OK;
}

long long ecp_result_trace_length(const ecp_result* result) {
  return result ? static_cast<long long>(result->value.trace.size()) : 0;
}

ecp_status ecp_result_trace_row(const ecp_result* result, long long row, long long* iteration,
                                double* temperature, double* distortion, double* entropy,
                                double* free_energy, int* effective_centroids) {
  ECP_REQUIRE(result);
  return guarded([&] {
    if (row < 0 || row >= static_cast<long long>(result->value.trace.size()))
      throw ecp::ValidationError("trace row index out of range");
    const auto& rec = result->value.trace[static_cast<size_t>(row)];
    if (iteration) *iteration = rec.iteration;
    if (temperature) *temperature = rec.temperature;
    if (distortion) *distortion = rec.distortion;
    if (entropy) *entropy = rec.entropy;
    if (free_energy) *free_energy = rec.free_energy;
    if (effective_centroids) *effective_centroids = rec.effective_centroids;
    return ECP_OK;
  });
}

ecp_status ecp_result_save_placement(const ecp_result* result, const char* path) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(path);
  return guarded([&] {
    ecp::save_placement(result->value.placement, path);
    return ECP_OK;
  });
}

ecp_status ecp_result_save_trace(const ecp_result* result, const char* path) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(path);
  return guarded([&] {
    ecp::write_trace_csv(result->value.trace, path);
    return ECP_OK;
  });
}

void ecp_result_destroy(ecp_result* result) { delete result; }

ecp_status ecp_placement_load(const char* path, const ecp_instance* instance,
                              ecp_placement** out) {
  ECP_REQUIRE(path);
  ECP_REQUIRE(out);
  return guarded([&] {
    auto handle = std::make_unique<ecp_placement>();
    handle->value =
        instance ? ecp::load_placement(path, instance->value) : ecp::load_placement(path);
    *out = handle.release();
    return ECP_OK;
  });
}

ecp_status ecp_placement_save(const ecp_placement* placement, const char* path) {
  ECP_REQUIRE(placement);
  ECP_REQUIRE(path);
  return guarded([&] {
    ecp::save_placement(placement->value, path);
    return ECP_OK;
  });
}

int ecp_placement_controller_count(const ecp_placement* placement) {
  return placement ? static_cast<int>(placement->value.controllers.size()) : 0;
}

ecp_status ecp_placement_controllers(const ecp_placement* placement, int* buffer) {
  ECP_REQUIRE(placement);
  ECP_REQUIRE(buffer);
  const auto& c = placement->value.controllers;
  std::copy(c.begin(), c.end(), buffer);
  return ECP_OK;
}

int ecp_placement_assignment_length(const ecp_placement* placement) {
  return placement ? static_cast<int>(placement->value.assignment.size()) : 0;
}

ecp_status ecp_placement_assignment(const ecp_placement* placement, int* buffer) {
  ECP_REQUIRE(placement);
  ECP_REQUIRE(buffer);
  const auto& a = placement->value.assignment;
  std::copy(a.begin(), a.end(), buffer);
  return ECP_OK;
}

ecp_status ecp_placement_leader(const ecp_placement* placement, int* out_leader) {
  ECP_REQUIRE(placement);
  ECP_REQUIRE(out_leader);
  *out_leader = placement->value.leader.value_or(-1);
  return ECP_OK;
}

ecp_status ecp_placement_objective(const ecp_placement* placement, double* delay_cost,
                                   double* sync_cost, double* total) {
  ECP_REQUIRE(placement);
  ECP_REQUIRE(delay_cost);
  ECP_REQUIRE(sync_cost);
  ECP_REQUIRE(total);
  const auto& obj = placement->value.objective;
  *delay_cost = obj.delay_cost;
  *sync_cost = obj.sync_cost;
  *total = obj.total;
  return ECP_OK;
}

void ecp_placement_destroy(ecp_placement* placement) { delete placement; }

ecp_status ecp_evaluate_leaderless(const ecp_instance* instance, const ecp_placement* placement,
                                   double* delay_cost, double* sync_cost, double* total) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(placement);
  ECP_REQUIRE(delay_cost);
  ECP_REQUIRE(sync_cost);
  ECP_REQUIRE(total);
  return guarded([&] {
    const ecp::ObjectiveBreakdown obj = ecp::evaluate_ll(instance->value, placement->value);
    *delay_cost = obj.delay_cost;
    *sync_cost = obj.sync_cost;
    *total = obj.total;
    return ECP_OK;
  });
}

ecp_status ecp_evaluate_leader_based(const ecp_instance* instance, const ecp_placement* placement,
                                     double* delay_cost, double* sync_cost, double* total) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(placement);
  ECP_REQUIRE(delay_cost);
  ECP_REQUIRE(sync_cost);
  ECP_REQUIRE(total);
  return guarded([&] {
    const ecp::ObjectiveBreakdown obj = ecp::evaluate_lb(instance->value, placement->value);
    *delay_cost = obj.delay_cost;
    *sync_cost = obj.sync_cost;
    *total = obj.total;
    return ECP_OK;
  });
}

ecp_status ecp_oracle_leaderless(const ecp_instance* instance, int max_controllers,
                                 ecp_placement** out, long long* subsets_enumerated) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(out);
  return guarded([&] {
    ecp::OracleResult res = ecp::solve_exact_ll(instance->value, max_controllers);
    if (subsets_enumerated) *subsets_enumerated = res.subsets_enumerated;
    *out = new ecp_placement{std::move(res.placement)};
    return ECP_OK;
  });
}

ecp_status ecp_oracle_leader_based(const ecp_instance* instance, int max_controllers,
                                   ecp_placement** out, long long* subsets_enumerated) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(out);
  return guarded([&] {
    ecp::OracleResult res = ecp::solve_exact_lb(instance->value, max_controllers);
    if (subsets_enumerated) *subsets_enumerated = res.subsets_enumerated;
    *out = new ecp_placement{std::move(res.placement)};
    return ECP_OK;
  });
}

ecp_status ecp_phase_scan(const ecp_instance* instance, const ecp_config* config, int grid_points,
                          uint64_t seed, ecp_phase_result** out) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(out);
  return guarded([&] {
    const ecp::ScheduleConfig cfg = config ? config->value : ecp::ScheduleConfig{};
    auto handle = std::make_unique<ecp_phase_result>();
    handle->value = ecp::find_critical_temperatures(instance->value, cfg, grid_points, seed);
    *out = handle.release();
    return ECP_OK;
  });
}

int ecp_phase_point_count(const ecp_phase_result* result) {
  return result ? static_cast<int>(result->value.points.size()) : 0;
}

ecp_status ecp_phase_point(const ecp_phase_result* result, int index, double* temperature,
                           double* det, int* effective_centroids) {
  ECP_REQUIRE(result);
  return guarded([&] {
    if (index < 0 || index >= static_cast<int>(result->value.points.size()))
      throw ecp::ValidationError("phase point index out of range");
    const auto& p = result->value.points[static_cast<size_t>(index)];
    if (temperature) *temperature = p.temperature;
    if (det) *det = p.det;
    if (effective_centroids) *effective_centroids = p.effective_centroids;
    return ECP_OK;
  });
}

int ecp_phase_critical_count(const ecp_phase_result* result) {
  return result ? static_cast<int>(result->value.critical_temperatures.size()) : 0;
}

ecp_status ecp_phase_critical(const ecp_phase_result* result, int index, double* temperature) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(temperature);
  return guarded([&] {
    if (index < 0 || index >= static_cast<int>(result->value.critical_temperatures.size()))
      throw ecp::ValidationError("critical temperature index out of range");
    *temperature = result->value.critical_temperatures[static_cast<size_t>(index)];
    return ECP_OK;
  });
}

ecp_status ecp_phase_save_csv(const ecp_phase_result* result, const char* path) {
  ECP_REQUIRE(result);
  ECP_REQUIRE(path);
  return guarded([&] {
    ecp::write_phase_csv(result->value, path);
    return ECP_OK;
  });
}

void ecp_phase_destroy(ecp_phase_result* result) { delete result; }

}  // extern "C"

namespace {

ecp_status solve(const ecp_instance* instance, const ecp_config* config, uint64_t seed,
                 ecp::SolverKind kind, ecp_result** out) {
  ECP_REQUIRE(instance);
  ECP_REQUIRE(out);
  return guarded([&] {
    const ecp::ScheduleConfig cfg = config ? config->value : ecp::ScheduleConfig{};
    auto handle = std::make_unique<ecp_result>();
    handle->value = kind == ecp::SolverKind::LeaderLess
                        ? ecp::run_ecp_ll(instance->value, cfg, seed)
                        : ecp::run_ecp_lb(instance->value, cfg, seed);
    *out = handle.release();
    return ECP_OK;
  });
}

}  // namespace
