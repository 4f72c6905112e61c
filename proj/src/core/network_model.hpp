#pragma once

#include <cstdint>

#include "core/types.hpp"

namespace ecp {

// Objective of a leaderless placement: total assignment delay plus the
// gamma-weighted pairwise synchronization load, where every controller
// exchanges state with every other controller once per assigned node.
ObjectiveBreakdown evaluate_ll(const NetworkInstance& instance, const Placement& placement);

// Objective of a leader-based placement: total assignment delay plus the
// gamma-weighted star synchronization load, where every controller
// exchanges state with the leader once per node in the network.
ObjectiveBreakdown evaluate_lb(const NetworkInstance& instance, const Placement& placement);

struct GenerationInfo {
  std::vector<std::vector<double>> centers;  // generating cluster centers
  std::vector<int> labels;                   // node -> generating cluster
};

struct GeneratorParams {
  int clusters = 1;
  int size = 1;
  int dimension = 2;
  std::uint64_t seed = 0;
  double cluster_spread = 0.5;
  double center_box_low = 0.0;
  double center_box_high = 10.0;
  double gamma = 0.1;
};

// Isotropic Gaussian blobs: cluster centers drawn uniformly from the box,
// node i attached to cluster i % clusters. Uniform weights, every node a
// candidate. Deterministic in the seed.
NetworkInstance generate_gaussian_instance(const GeneratorParams& params,
                                           GenerationInfo* info = nullptr);

NetworkInstance load_instance(const std::string& path);
void save_instance(const NetworkInstance& instance, const std::string& path);

Placement load_placement(const std::string& path);
Placement load_placement(const std::string& path, const NetworkInstance& instance);
void save_placement(const Placement& placement, const std::string& path);

}  // namespace ecp
