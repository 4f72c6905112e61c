#include "core/da_driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/ecp_lb.hpp"
#include "core/ecp_ll.hpp"
#include "core/rng.hpp"

namespace ecp::detail {

namespace {

constexpr double kMassFloor = 1e-300;

// The coupled centroid system is a fixed-point heuristic, not an exact
// minimizer of the measured distortion, so at low temperature a sweep can
// overshoot and raise F. Such a sweep is treated as equilibrium: the state
// reverts to the previous sweep and the temperature step ends.
constexpr double kRiseSlack = 1e-7;

// Above its critical temperature a split pair is re-absorbed: the copies
// contract onto one point until they are bit-for-bit identical, after which
// the association rule can never separate them again. Dropping the repeats
// between temperature steps frees those slots so the next cooling step seeds
// a fresh perturbation instead of carrying dead copies to the end of the run.
// Stale association columns are fine: every consumer rebuilds associations
// from the centroids first.
void drop_repeated_centroids(AnnealState& state) {
  auto& pos = state.centroids.positions;
  std::vector<std::vector<double>> unique;
  unique.reserve(pos.size());
  for (auto& p : pos) {
    bool repeat = false;
    for (const auto& q : unique)
      if (p == q) {
        repeat = true;
        break;
      }
    if (!repeat) unique.push_back(std::move(p));
  }
  pos = std::move(unique);
}

// Optimal single-centroid position under the solver's measure: the weighted
// mean for the leaderless distortion, the plain mean for the leader-based one.
std::vector<double> mass_center(const NetworkInstance& instance, SolverKind kind) {
  const int d = instance.dimension;
  std::vector<double> center(static_cast<size_t>(d), 0.0);
  double total = 0.0;
  for (int i = 0; i < instance.size(); ++i) {
    const double w = kind == SolverKind::LeaderLess ? instance.weight(i) : 1.0;
    const auto pos = instance.position(i);
    for (int k = 0; k < d; ++k) center[static_cast<size_t>(k)] += w * pos[k];
    total += w;
  }
  for (double& v : center) v /= total;
  return center;
}

}  // namespace

std::vector<double> distortion_addend(const IterationContext& ctx, SolverKind kind, double gamma) {
  std::vector<double> addend(static_cast<size_t>(ctx.m), 0.0);
  if (kind == SolverKind::LeaderLess)
    for (int j = 0; j < ctx.m; ++j)
      addend[static_cast<size_t>(j)] = gamma * ctx.sync_sum[static_cast<size_t>(j)];
  return addend;
}

AssociationMatrix boltzmann_rows(const IterationContext& ctx, const std::vector<double>& addend,
                                 double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("association update requires temperature > 0");
  AssociationMatrix out;
  out.rows = ctx.n;
  out.cols = ctx.m;
  out.values.resize(static_cast<size_t>(ctx.n) * ctx.m);
  std::vector<double> cost(static_cast<size_t>(ctx.m));
  for (int i = 0; i < ctx.n; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ctx.m; ++j) {
      cost[static_cast<size_t>(j)] = ctx.node_centroid(i, j) + addend[static_cast<size_t>(j)];
      lo = std::min(lo, cost[static_cast<size_t>(j)]);
    }
    double z = 0.0;
    for (int j = 0; j < ctx.m; ++j) {
      const double e = std::exp(-(cost[static_cast<size_t>(j)] - lo) / temperature);
      out.at(i, j) = e;
      z += e;
    }
    for (int j = 0; j < ctx.m; ++j) out.at(i, j) /= z;
  }
  return out;
}

void association_step(const IterationContext& ctx, AnnealState& state, SolverKind kind,
                      double gamma) {
  state.associations = kind == SolverKind::LeaderLess
                           ? ll_association_update(ctx, gamma, state.temperature)
                           : lb_association_update(ctx, state.temperature);
}

TraceRecord measure_state(const IterationContext& ctx, const NetworkInstance& instance,
                          const AnnealState& state, SolverKind kind, double merge_tolerance,
                          long long iteration) {
  const double gamma = instance.gamma;
  const std::vector<double> addend = distortion_addend(ctx, kind, gamma);
  const AssociationMatrix& p = state.associations;
  double distortion = 0.0;
  double neg_entropy = 0.0;
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.m; ++j) {
      const double pij = p.at(i, j);
      distortion += pij * (ctx.node_centroid(i, j) + addend[static_cast<size_t>(j)]);
      if (pij > 0.0) neg_entropy += pij * std::log(pij);
    }
  if (kind == SolverKind::LeaderBased)
    distortion += (gamma * ctx.n) * ctx.sync_sum[static_cast<size_t>(leader_index(ctx))];

  TraceRecord rec;
  rec.iteration = iteration;
  rec.temperature = state.temperature;
  rec.distortion = distortion;
  rec.entropy = -neg_entropy;
  rec.free_energy = free_energy(distortion, state.temperature, rec.entropy);
  rec.effective_centroids = merge_coincident(state.centroids, merge_tolerance).count();
  return rec;
}

void centroid_step(const IterationContext& ctx, const NetworkInstance& instance,
                   AnnealState& state, SolverKind kind) {
  const AssociationMatrix& p = state.associations;
  const int n = ctx.n;
  const int m = ctx.m;
  const int d = instance.dimension;
  const double gamma = instance.gamma;

  // Column masses and first moments; the leaderless solver folds the node
  // weights in, the leader-based one counts plain association mass.
  std::vector<double> mass(static_cast<size_t>(m), 0.0);
  std::vector<std::vector<double>> moment(static_cast<size_t>(m),
                                          std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int i = 0; i < n; ++i) {
    const auto pos = instance.position(i);
    const double wi = kind == SolverKind::LeaderLess ? instance.weight(i) : 1.0;
    for (int j = 0; j < m; ++j) {
      const double pw = kind == SolverKind::LeaderLess ? p.at(i, j) * wi : p.at(i, j);
      mass[static_cast<size_t>(j)] += pw;
      auto& mo = moment[static_cast<size_t>(j)];
      for (int k = 0; k < d; ++k) mo[static_cast<size_t>(k)] += pw * pos[k];
    }
  }

  std::vector<int> keep;
  keep.reserve(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j)
    if (mass[static_cast<size_t>(j)] >= kMassFloor) keep.push_back(j);
  if (keep.empty()) throw DegenerateClusterError(0, "all clusters lost their association mass");
  const int mk = static_cast<int>(keep.size());

  AssociationMatrix pruned;
  const AssociationMatrix* assoc = &p;
  if (mk != m) {
    pruned.rows = n;
    pruned.cols = mk;
    pruned.values.resize(static_cast<size_t>(n) * mk);
    for (int i = 0; i < n; ++i)
      for (int jk = 0; jk < mk; ++jk) pruned.at(i, jk) = p.at(i, keep[static_cast<size_t>(jk)]);
    assoc = &pruned;
  }

  CentroidSet next;
  if (kind == SolverKind::LeaderLess) {
    std::vector<std::vector<double>> c(static_cast<size_t>(mk));
    std::vector<double> total(static_cast<size_t>(d), 0.0);
    for (int jk = 0; jk < mk; ++jk) {
      const int j = keep[static_cast<size_t>(jk)];
      auto& cj = c[static_cast<size_t>(jk)];
      cj.resize(static_cast<size_t>(d));
      for (int k = 0; k < d; ++k) {
        cj[static_cast<size_t>(k)] =
            moment[static_cast<size_t>(j)][static_cast<size_t>(k)] / mass[static_cast<size_t>(j)];
        total[static_cast<size_t>(k)] += cj[static_cast<size_t>(k)];
      }
    }
    const double denom = gamma * mk + 1.0;
    next.positions.resize(static_cast<size_t>(mk));
    for (int jk = 0; jk < mk; ++jk) {
      auto& y = next.positions[static_cast<size_t>(jk)];
      y.resize(static_cast<size_t>(d));
      for (int k = 0; k < d; ++k)
        y[static_cast<size_t>(k)] =
            (c[static_cast<size_t>(jk)][static_cast<size_t>(k)] + gamma * total[static_cast<size_t>(k)]) /
            denom;
    }
  } else {
    // Leader picked from the surviving centroids' current geometry.
    int leader = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int jk = 0; jk < mk; ++jk) {
      double s = 0.0;
      for (int bk = 0; bk < mk; ++bk)
        s += ctx.centroid_sq[static_cast<size_t>(keep[static_cast<size_t>(jk)]) * m +
                             keep[static_cast<size_t>(bk)]];
      if (s < best) {
        best = s;
        leader = jk;
      }
    }
    next = lb_centroid_update(*assoc, instance, leader, gamma);
  }

  state.centroids = std::move(next);
  if (mk != m) state.associations = std::move(pruned);
}

bool equilibrate(const NetworkInstance& instance, AnnealState& state,
                 const ResolvedSchedule& schedule, SolverKind kind,
                 std::vector<TraceRecord>* trace, long long& iteration) {
  state.free_energy_history.clear();
  const size_t first_row = trace ? trace->size() : 0;
  bool settled = false;
  CentroidSet prev_centroids;
  AssociationMatrix prev_associations;
  for (int it = 0; it < schedule.max_iters_per_temperature; ++it) {
    const IterationContext ctx = make_context(instance, state.centroids);
    association_step(ctx, state, kind, instance.gamma);
    const TraceRecord rec =
        measure_state(ctx, instance, state, kind, schedule.merge_tolerance, iteration);
    if (!state.free_energy_history.empty()) {
      const double prev = state.free_energy_history.back();
      if (rec.free_energy > prev + kRiseSlack * std::max(1.0, std::abs(prev))) {
        state.centroids = std::move(prev_centroids);
        state.associations = std::move(prev_associations);
        settled = true;
        break;
      }
    }
    ++iteration;
    state.free_energy_history.push_back(rec.free_energy);
    if (trace) trace->push_back(rec);
    if (converged(state.free_energy_history, schedule.delta)) {
      settled = true;
      break;
    }
    prev_centroids = state.centroids;
    prev_associations = state.associations;
    centroid_step(ctx, instance, state, kind);
  }
  if (!settled && trace && trace->size() > first_row) trace->back().iteration_capped = true;
  return settled;
}

void zero_temperature_step(const NetworkInstance& instance, AnnealState& state, SolverKind kind) {
  const IterationContext ctx = make_context(instance, state.centroids);
  const std::vector<double> addend = distortion_addend(ctx, kind, instance.gamma);
  AssociationMatrix hard;
  hard.rows = ctx.n;
  hard.cols = ctx.m;
  hard.values.assign(static_cast<size_t>(ctx.n) * ctx.m, 0.0);
  for (int i = 0; i < ctx.n; ++i) {
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ctx.m; ++j) {
      const double cost = ctx.node_centroid(i, j) + addend[static_cast<size_t>(j)];
      if (cost < best_cost) {
        best_cost = cost;
        best = j;
      }
    }
    hard.at(i, best) = 1.0;
  }
  state.associations = std::move(hard);
  centroid_step(ctx, instance, state, kind);
}

RunResult run_annealing(const NetworkInstance& instance, const ScheduleConfig& config,
                        SolverKind kind, uint64_t seed) {
  instance.validate();
  const ResolvedSchedule resolved = resolve_schedule(config, instance);
  AnnealState state = initialize(instance, resolved);
  Rng rng(seed);
  RunResult result;
  long long iteration = 0;
  while (true) {
    equilibrate(instance, state, resolved, kind, &result.trace, iteration);
    drop_repeated_centroids(state);
    if (state.temperature <= resolved.t_min) break;
    cool(state, resolved.alpha);
    if (state.centroids.count() < resolved.k_max)
      split_centroids(state, rng, resolved.k_max, resolved.perturb_scale);
  }
  // Three candidate readings of the final soft solution: the zero-temperature
  // refit, the annealed state it started from, and the unsplit single
  // centroid. The refit sharpens a clean partition but can pull a pair the
  // anneal had re-absorbed back apart, and under heavy coupling any split is
  // a loss, in which case the unsplit candidate projects to the best
  // single-controller placement outright. Keep the cheapest projection.
  AnnealState annealed = state;
  zero_temperature_step(instance, state, kind);

  AnnealState unsplit;
  unsplit.temperature = state.temperature;
  unsplit.centroids.positions.push_back(mass_center(instance, kind));

  result.placement =
      hard_assign_and_project(instance, state.centroids, kind, resolved.merge_tolerance);
  for (const AnnealState* cand : {&annealed, &unsplit}) {
    Placement p =
        hard_assign_and_project(instance, cand->centroids, kind, resolved.merge_tolerance);
    if (p.objective.total < result.placement.objective.total) result.placement = std::move(p);
  }
  result.soft_objective = relax_placement(instance, result.placement, kind);
  return result;
}

}  // namespace ecp::detail
