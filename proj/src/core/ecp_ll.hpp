#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "core/annealing.hpp"
#include "core/types.hpp"

namespace ecp {

// Boltzmann association against distortion d_ij + gamma * sync_sum[j].
AssociationMatrix ll_association_update(const IterationContext& ctx, double gamma,
                                        double temperature);

// Column-normalized reverse association p(node i | centroid j); throws
// DegenerateClusterError when a column carries no mass.
AssociationMatrix posterior(const AssociationMatrix& associations,
                            const std::vector<double>& weights);

// Coupled centroid system solved in closed form.
CentroidSet ll_centroid_solve(const AssociationMatrix& posterior_matrix,
                              const NetworkInstance& instance, double gamma);

// Same system via a dense linear solve; cross-check for the closed form.
CentroidSet ll_centroid_solve_dense(const AssociationMatrix& posterior_matrix,
                                    const NetworkInstance& instance, double gamma);

// Coefficient matrix of the coupled system: diagonal blocks
// (gamma*(m-1)+1)*I, off-diagonal blocks -gamma*I.
Eigen::MatrixXd ll_coefficient_matrix(int m, int dimension, double gamma);

// det = (gamma*m + 1)^((m-1)*dimension)
double ll_coefficient_determinant(int m, int dimension, double gamma);

RunResult run_ecp_ll(const NetworkInstance& instance, const ScheduleConfig& config,
                     uint64_t seed = 0);

}  // namespace ecp

