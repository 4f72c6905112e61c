#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/annealing.hpp"
#include "core/types.hpp"

namespace ecp {

// Stability matrix of the equilibrated state, split as M(T) = stable - scaled / T.
struct PhaseBlocks {
  Eigen::MatrixXd stable;
  Eigen::MatrixXd scaled;
};

struct PhasePoint {
  double temperature = 0.0;
  double det = 0.0;
  int effective_centroids = 0;
};

struct PhaseScanResult {
  std::vector<PhasePoint> points;                 // scan order, hot to cold
  std::vector<double> critical_temperatures;      // descending
};

PhaseBlocks build_blocks(const NetworkInstance& instance, const CentroidSet& centroids,
                         const AssociationMatrix& associations, double gamma);

Eigen::MatrixXd critical_matrix(const PhaseBlocks& blocks, double temperature);

// Equilibrates a single-centroid state down a geometric temperature grid,
// tracking det M(T); sign changes are refined by geometric bisection.
// The effective-centroid column comes from a reference annealing run.
PhaseScanResult find_critical_temperatures(const NetworkInstance& instance,
                                           const ScheduleConfig& config, int grid_points = 64,
                                           uint64_t seed = 0);

PhaseScanResult find_critical_temperatures(const NetworkInstance& instance,
                                           const ScheduleConfig& config,
                                           const std::vector<double>& grid, uint64_t seed = 0);

void write_phase_csv(const PhaseScanResult& result, const std::string& path);

}  // namespace ecp

