#pragma once

#include <cstdint>

#include "core/annealing.hpp"
#include "core/types.hpp"

namespace ecp {

// Centroid with the smallest sum of squared distances to the others;
// ties resolve to the lowest index.
int leader_index(const IterationContext& ctx);

// Boltzmann association against the plain node-centroid distortion.
AssociationMatrix lb_association_update(const IterationContext& ctx, double temperature);

// Joint update of leader and followers for fixed associations: the leader
// solves its reduced equation first, followers then shrink towards it.
CentroidSet lb_centroid_update(const AssociationMatrix& associations,
                               const NetworkInstance& instance, int leader, double gamma);

// Same stationarity system via a dense linear solve; cross-check.
CentroidSet lb_centroid_update_dense(const AssociationMatrix& associations,
                                     const NetworkInstance& instance, int leader, double gamma);

// Max-abs gradient residual of the fixed-association objective at the
// given centroids (factor 2 dropped).
double lb_stationarity_residual(const AssociationMatrix& associations,
                                const NetworkInstance& instance, const CentroidSet& centroids,
                                int leader, double gamma);

RunResult run_ecp_lb(const NetworkInstance& instance, const ScheduleConfig& config,
                     uint64_t seed = 0);

}  // namespace ecp

