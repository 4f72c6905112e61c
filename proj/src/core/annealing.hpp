#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace ecp {

class Rng;

enum class SolverKind { LeaderLess, LeaderBased };

struct CentroidSet {
  std::vector<std::vector<double>> positions;

  int count() const { return static_cast<int>(positions.size()); }
  int dimension() const {
    return positions.empty() ? 0 : static_cast<int>(positions.front().size());
  }
};

// Row-major dense matrix of association probabilities; rows sum to one.
struct AssociationMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  static AssociationMatrix uniform(int rows, int cols);
  double& at(int i, int j) { return values[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return values[static_cast<size_t>(i) * cols + j]; }
};

// Pairwise geometry shared by both solvers, rebuilt once per sweep.
struct IterationContext {
  int n = 0;
  int m = 0;
  std::vector<double> node_centroid_sq;  // n x m, row-major
  std::vector<double> centroid_sq;       // m x m
  std::vector<double> sync_sum;          // per-centroid sum of centroid_sq row

  double node_centroid(int i, int j) const {
    return node_centroid_sq[static_cast<size_t>(i) * m + j];
  }
};

// Unset fields are resolved from instance statistics.
struct ScheduleConfig {
  std::optional<double> t_max;
  std::optional<double> t_min;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> perturb_scale;
  std::optional<double> merge_tolerance;
  std::optional<int> k_max;
  std::optional<int> max_iters_per_temperature;
};

struct ResolvedSchedule {
  double t_max = 0.0;
  double t_min = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double perturb_scale = 0.0;
  double merge_tolerance = 0.0;
  int k_max = 0;
  int max_iters_per_temperature = 0;
  double lambda_max = 0.0;
  double initial_distortion = 0.0;
};

struct TraceRecord {
  long long iteration = 0;
  double temperature = 0.0;
  double distortion = 0.0;
  double entropy = 0.0;
  double free_energy = 0.0;
  int effective_centroids = 0;
  bool iteration_capped = false;  // in-memory flag, not part of the CSV
};

struct AnnealState {
  double temperature = 0.0;
  CentroidSet centroids;
  AssociationMatrix associations;
  std::vector<double> free_energy_history;  // free energy at the current temperature
};

struct RunResult {
  Placement placement;
  std::vector<TraceRecord> trace;
  double soft_objective = 0.0;
};

IterationContext make_context(const NetworkInstance& instance, const CentroidSet& centroids);

// Weighted Shannon entropy of the association rows: -sum_i w_i sum_j p_ij ln p_ij.
double entropy(const AssociationMatrix& associations, const std::vector<double>& weights);

double free_energy(double distortion, double temperature, double entropy_value);

std::vector<double> weighted_mass_center(const NetworkInstance& instance);

// Largest eigenvalue of the weighted covariance of the node positions.
double weighted_covariance_lambda_max(const NetworkInstance& instance);

ResolvedSchedule resolve_schedule(const ScheduleConfig& config, const NetworkInstance& instance);

// One centroid at the weighted mass center, all mass associated with it.
AnnealState initialize(const NetworkInstance& instance, const ResolvedSchedule& schedule);

// Scales the temperature and starts a fresh free-energy history.
void cool(AnnealState& state, double alpha);

// Replaces up to k_max - m centroids by perturbed pairs; no-op at capacity.
void split_centroids(AnnealState& state, Rng& rng, int k_max, double perturb_scale);

// Groups centroids within tolerance of each other (transitively) into their means.
CentroidSet merge_coincident(const CentroidSet& centroids, double tolerance);

bool converged(const std::vector<double>& free_energy_history, double delta);

// Collapses coincident centroids, assigns nodes, projects onto candidate
// nodes and evaluates the resulting integer placement.
Placement hard_assign_and_project(const NetworkInstance& instance, const CentroidSet& centroids,
                                  SolverKind kind, double merge_tolerance);

// Objective of the placement with its controllers released from the candidate
// grid: positions re-solved exactly for the placement's own assignment (and
// leader), everything else kept. Lower-bounds the projected objective.
double relax_placement(const NetworkInstance& instance, const Placement& placement,
                       SolverKind kind);

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path);

}  // namespace ecp

