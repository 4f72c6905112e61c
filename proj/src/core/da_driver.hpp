#pragma once

#include <cstdint>
#include <vector>

#include "core/annealing.hpp"
#include "core/types.hpp"

namespace ecp::detail {

// Per-centroid additive distortion term: gamma * sync for the leaderless
// solver, zero for the leader-based one.
std::vector<double> distortion_addend(const IterationContext& ctx, SolverKind kind, double gamma);

// Row-normalized exp(-(d_ij + addend_j) / T) with a per-row shift.
AssociationMatrix boltzmann_rows(const IterationContext& ctx, const std::vector<double>& addend,
                                 double temperature);

void association_step(const IterationContext& ctx, AnnealState& state, SolverKind kind,
                      double gamma);

TraceRecord measure_state(const IterationContext& ctx, const NetworkInstance& instance,
                          const AnnealState& state, SolverKind kind, double merge_tolerance,
                          long long iteration);

// Drops centroids with vanished association mass, then re-solves the
// solver-specific centroid system.
void centroid_step(const IterationContext& ctx, const NetworkInstance& instance,
                   AnnealState& state, SolverKind kind);

// Alternates association and centroid steps at the current temperature until
// the free energy settles; returns false when the iteration cap was hit.
bool equilibrate(const NetworkInstance& instance, AnnealState& state,
                 const ResolvedSchedule& schedule, SolverKind kind,
                 std::vector<TraceRecord>* trace, long long& iteration);

// Hard-assignment limit: one-hot associations followed by a centroid re-solve.
void zero_temperature_step(const NetworkInstance& instance, AnnealState& state, SolverKind kind);

RunResult run_annealing(const NetworkInstance& instance, const ScheduleConfig& config,
                        SolverKind kind, uint64_t seed);

}  // namespace ecp::detail

