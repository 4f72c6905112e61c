#include "core/annealing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "core/csv.hpp"
#include "core/network_model.hpp"
#include "core/rng.hpp"

namespace ecp {

namespace {

constexpr double kLambdaFloor = 1e-12;
constexpr double kDeltaFloor = 1e-12;
constexpr double kPerturbFloor = 1e-12;
constexpr double kMergeFloor = 1e-10;

int nearest_candidate(const NetworkInstance& inst, std::span<const double> point) {
  int best = inst.candidates.front();
  double best_d = squared_distance(point, inst.position(best));
  for (int c : inst.candidates) {
    const double d = squared_distance(point, inst.position(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Per-entry sum of squared distances to the other entries of the same list.
std::vector<double> pairwise_sync(const NetworkInstance& inst, const std::vector<int>& nodes) {
  std::vector<double> s(nodes.size(), 0.0);
  for (size_t a = 0; a < nodes.size(); ++a)
    for (size_t b = 0; b < nodes.size(); ++b)
      if (a != b) s[a] += squared_distance(inst.position(nodes[a]), inst.position(nodes[b]));
  return s;
}

CentroidSet merge_once(const CentroidSet& centroids, double tolerance, bool* changed) {
  const int m = centroids.count();
  std::vector<int> parent(static_cast<size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  const double tol_sq = tolerance * tolerance;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      std::span<const double> pa(centroids.positions[static_cast<size_t>(a)]);
      std::span<const double> pb(centroids.positions[static_cast<size_t>(b)]);
      if (squared_distance(pa, pb) <= tol_sq) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
    }

  std::vector<int> group_of(static_cast<size_t>(m), -1);
  CentroidSet out;
  std::vector<int> group_size;
  for (int j = 0; j < m; ++j) {
    const int r = find(j);
    if (group_of[static_cast<size_t>(r)] < 0) {
      group_of[static_cast<size_t>(r)] = out.count();
      out.positions.push_back(std::vector<double>(centroids.positions[static_cast<size_t>(j)].size(), 0.0));
      group_size.push_back(0);
    }
    const int g = group_of[static_cast<size_t>(r)];
    auto& acc = out.positions[static_cast<size_t>(g)];
    const auto& pos = centroids.positions[static_cast<size_t>(j)];
    for (size_t k = 0; k < pos.size(); ++k) acc[k] += pos[k];
    group_size[static_cast<size_t>(g)] += 1;
  }
  for (int g = 0; g < out.count(); ++g)
    for (auto& x : out.positions[static_cast<size_t>(g)]) x /= group_size[static_cast<size_t>(g)];
  *changed = out.count() != m;
  return out;
}

}  // namespace

AssociationMatrix AssociationMatrix::uniform(int rows, int cols) {
  AssociationMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.values.assign(static_cast<size_t>(rows) * cols, cols > 0 ? 1.0 / cols : 0.0);
  return a;
}

IterationContext make_context(const NetworkInstance& instance, const CentroidSet& centroids) {
  IterationContext ctx;
  ctx.n = instance.size();
  ctx.m = centroids.count();
  ctx.node_centroid_sq.resize(static_cast<size_t>(ctx.n) * ctx.m);
  ctx.centroid_sq.resize(static_cast<size_t>(ctx.m) * ctx.m);
  ctx.sync_sum.assign(static_cast<size_t>(ctx.m), 0.0);
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.m; ++j)
      ctx.node_centroid_sq[static_cast<size_t>(i) * ctx.m + j] =
          squared_distance(instance.position(i), centroids.positions[static_cast<size_t>(j)]);
  for (int a = 0; a < ctx.m; ++a)
    for (int b = 0; b < ctx.m; ++b) {
      std::span<const double> pa(centroids.positions[static_cast<size_t>(a)]);
      std::span<const double> pb(centroids.positions[static_cast<size_t>(b)]);
      const double d = a == b ? 0.0 : squared_distance(pa, pb);
      ctx.centroid_sq[static_cast<size_t>(a) * ctx.m + b] = d;
      ctx.sync_sum[static_cast<size_t>(a)] += d;
    }
  return ctx;
}

double entropy(const AssociationMatrix& associations, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != associations.rows)
    throw ValidationError("entropy: weights length differs from association rows");
  double h = 0.0;
  for (int i = 0; i < associations.rows; ++i) {
    double row = 0.0;
    for (int j = 0; j < associations.cols; ++j) {
      const double p = associations.at(i, j);
      if (p > 0.0) row += p * std::log(p);
    }
    h -= weights[static_cast<size_t>(i)] * row;
  }
  return h;
}

double free_energy(double distortion, double temperature, double entropy_value) {
  return distortion - temperature * entropy_value;
}

std::vector<double> weighted_mass_center(const NetworkInstance& instance) {
  std::vector<double> center(static_cast<size_t>(instance.dimension), 0.0);
  for (int i = 0; i < instance.size(); ++i) {
    const auto pos = instance.position(i);
    const double w = instance.weight(i);
    for (int k = 0; k < instance.dimension; ++k) center[static_cast<size_t>(k)] += w * pos[k];
  }
  return center;
}

double weighted_covariance_lambda_max(const NetworkInstance& instance) {
  const int d = instance.dimension;
  const std::vector<double> mu = weighted_mass_center(instance);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd diff(d);
  for (int i = 0; i < instance.size(); ++i) {
    const auto pos = instance.position(i);
    for (int k = 0; k < d; ++k) diff(k) = pos[k] - mu[static_cast<size_t>(k)];
    cov.noalias() += instance.weight(i) * diff * diff.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  return solver.eigenvalues().maxCoeff();
}

ResolvedSchedule resolve_schedule(const ScheduleConfig& config, const NetworkInstance& instance) {
  instance.validate();
  ResolvedSchedule r;
  r.lambda_max = weighted_covariance_lambda_max(instance);
  const double lambda_eff = std::max(r.lambda_max, kLambdaFloor);

  const std::vector<double> center = weighted_mass_center(instance);
  double init_distortion = 0.0;
  for (int i = 0; i < instance.size(); ++i)
    init_distortion += squared_distance(instance.position(i), center);
  r.initial_distortion = init_distortion;

  r.t_max = config.t_max.value_or(20.0 * lambda_eff);
  r.t_min = config.t_min.value_or(1e-4 * r.t_max);
  r.alpha = config.alpha.value_or(0.9);
  r.delta = config.delta.value_or(std::max(1e-6 * init_distortion, kDeltaFloor));
  r.perturb_scale = config.perturb_scale.value_or(std::max(1e-3 * std::sqrt(lambda_eff), kPerturbFloor));
  r.merge_tolerance =
      config.merge_tolerance.value_or(std::max(1e-2 * std::sqrt(lambda_eff), kMergeFloor));
  r.k_max = config.k_max.value_or(8);
  r.max_iters_per_temperature = config.max_iters_per_temperature.value_or(100);

  if (!(r.t_max > 0.0)) throw ValidationError("schedule: t_max must be > 0");
  if (!(r.t_min > 0.0)) throw ValidationError("schedule: t_min must be > 0");
  if (r.t_min > r.t_max) throw ValidationError("schedule: t_min must not exceed t_max");
  if (!(r.alpha > 0.0 && r.alpha < 1.0)) throw ValidationError("schedule: alpha must be in (0, 1)");
  if (!(r.delta > 0.0)) throw ValidationError("schedule: delta must be > 0");
  if (!(r.perturb_scale > 0.0)) throw ValidationError("schedule: perturb_scale must be > 0");
  if (r.merge_tolerance < 0.0) throw ValidationError("schedule: merge_tolerance must be >= 0");
  if (r.k_max < 1) throw ValidationError("schedule: k_max must be >= 1");
  if (r.max_iters_per_temperature < 1)
    throw ValidationError("schedule: max_iters_per_temperature must be >= 1");
  return r;
}

AnnealState initialize(const NetworkInstance& instance, const ResolvedSchedule& schedule) {
  AnnealState state;
  state.temperature = schedule.t_max;
  state.centroids.positions.push_back(weighted_mass_center(instance));
  state.associations.rows = instance.size();
  state.associations.cols = 1;
  state.associations.values.assign(static_cast<size_t>(instance.size()), 1.0);
  return state;
}

void cool(AnnealState& state, double alpha) {
  state.temperature *= alpha;
  state.free_energy_history.clear();
}

void split_centroids(AnnealState& state, Rng& rng, int k_max, double perturb_scale) {
  const int m = state.centroids.count();
  const int n_split = std::min(m, k_max - m);
  if (n_split <= 0) return;
  const int d = state.centroids.dimension();
  CentroidSet next;
  next.positions.reserve(static_cast<size_t>(m + n_split));
  for (int j = 0; j < n_split; ++j) {
    const auto& y = state.centroids.positions[static_cast<size_t>(j)];
    const std::vector<double> eps = rng.direction(d, perturb_scale);
    std::vector<double> plus = y, minus = y;
    for (int k = 0; k < d; ++k) {
      plus[static_cast<size_t>(k)] += eps[static_cast<size_t>(k)];
      minus[static_cast<size_t>(k)] -= eps[static_cast<size_t>(k)];
    }
    next.positions.push_back(std::move(plus));
    next.positions.push_back(std::move(minus));
  }
  for (int j = n_split; j < m; ++j)
    next.positions.push_back(state.centroids.positions[static_cast<size_t>(j)]);
  state.centroids = std::move(next);
  state.associations = AssociationMatrix::uniform(state.associations.rows, state.centroids.count());
}

CentroidSet merge_coincident(const CentroidSet& centroids, double tolerance) {
  CentroidSet current = centroids;
  bool changed = current.count() > 1;
  while (changed) current = merge_once(current, tolerance, &changed);
  return current;
}

bool converged(const std::vector<double>& free_energy_history, double delta) {
  const size_t n = free_energy_history.size();
  if (n < 2) return false;
  return std::abs(free_energy_history[n - 1] - free_energy_history[n - 2]) < delta;
}

double relax_placement(const NetworkInstance& instance, const Placement& placement,
                       SolverKind kind) {
  const int m = static_cast<int>(placement.controllers.size());
  if (m < 1) throw ValidationError("relaxation requires at least one controller");
  const int n = instance.size();
  const int d = instance.dimension;
  const double gamma = instance.gamma;

  std::vector<int> group(static_cast<size_t>(n), -1);
  std::vector<double> counts(static_cast<size_t>(m), 0.0);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, d);
  for (int i = 0; i < n; ++i) {
    int g = -1;
    for (int j = 0; j < m; ++j)
      if (placement.controllers[static_cast<size_t>(j)] == placement.assignment[static_cast<size_t>(i)]) {
        g = j;
        break;
      }
    if (g < 0) throw ValidationError("assignment references an unknown controller");
    group[static_cast<size_t>(i)] = g;
    counts[static_cast<size_t>(g)] += 1.0;
    const auto pos = instance.position(i);
    for (int k = 0; k < d; ++k) sums(g, k) += pos[k];
  }
  for (int j = 0; j < m; ++j)
    if (counts[static_cast<size_t>(j)] == 0.0)
      throw ValidationError("relaxation requires every controller to serve a node");

  int leader = 0;
  if (kind == SolverKind::LeaderBased) {
    if (!placement.leader) throw ValidationError("leader-based relaxation requires a leader");
    leader = -1;
    for (int j = 0; j < m; ++j)
      if (placement.controllers[static_cast<size_t>(j)] == *placement.leader) leader = j;
    if (leader < 0) throw ValidationError("leader is not one of the controllers");
  }

  // Normal equations of the objective in the free positions, one shared matrix
  // for all coordinates.
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) quad(j, j) = counts[static_cast<size_t>(j)];
  if (kind == SolverKind::LeaderLess) {
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        if (j != l) {
          const double c = gamma * (counts[static_cast<size_t>(j)] + counts[static_cast<size_t>(l)]);
          quad(j, j) += c;
          quad(j, l) -= c;
        }
  } else {
    for (int l = 0; l < m; ++l)
      if (l != leader) {
        const double c = gamma * n;
        quad(l, l) += c;
        quad(leader, leader) += c;
        quad(l, leader) -= c;
        quad(leader, l) -= c;
      }
  }
  const Eigen::MatrixXd free_positions = quad.ldlt().solve(sums);

  double delay = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto pos = instance.position(i);
    const int g = group[static_cast<size_t>(i)];
    for (int k = 0; k < d; ++k) {
      const double diff = pos[k] - free_positions(g, k);
      delay += diff * diff;
    }
  }
  double sync = 0.0;
  if (kind == SolverKind::LeaderLess) {
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        if (j != l)
          sync += counts[static_cast<size_t>(j)] *
                  (free_positions.row(j) - free_positions.row(l)).squaredNorm();
  } else {
    for (int l = 0; l < m; ++l)
      if (l != leader)
        sync += n * (free_positions.row(leader) - free_positions.row(l)).squaredNorm();
  }
  return delay + gamma * sync;
}

Placement hard_assign_and_project(const NetworkInstance& instance, const CentroidSet& centroids,
                                  SolverKind kind, double merge_tolerance) {
  if (centroids.count() < 1) throw ValidationError("hard assignment requires at least one centroid");
  const CentroidSet merged = merge_coincident(centroids, merge_tolerance);
  const int m = merged.count();
  const double gamma = instance.gamma;

  std::vector<double> centroid_sync(static_cast<size_t>(m), 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) {
        std::span<const double> pa(merged.positions[static_cast<size_t>(a)]);
        std::span<const double> pb(merged.positions[static_cast<size_t>(b)]);
        centroid_sync[static_cast<size_t>(a)] += squared_distance(pa, pb);
      }

  std::vector<bool> used(static_cast<size_t>(m), false);
  for (int i = 0; i < instance.size(); ++i) {
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      double cost = squared_distance(instance.position(i), merged.positions[static_cast<size_t>(j)]);
      if (kind == SolverKind::LeaderLess) cost += gamma * centroid_sync[static_cast<size_t>(j)];
      if (cost < best_cost) {
        best_cost = cost;
        best = j;
      }
    }
    used[static_cast<size_t>(best)] = true;
  }

  std::vector<int> controllers;
  for (int j = 0; j < m; ++j)
    if (used[static_cast<size_t>(j)])
      controllers.push_back(nearest_candidate(instance, merged.positions[static_cast<size_t>(j)]));
  std::sort(controllers.begin(), controllers.end());
  controllers.erase(std::unique(controllers.begin(), controllers.end()), controllers.end());

  const std::vector<double> node_sync = pairwise_sync(instance, controllers);
  Placement pl;
  pl.controllers = controllers;
  pl.assignment.resize(static_cast<size_t>(instance.size()));
  for (int i = 0; i < instance.size(); ++i) {
    int best_slot = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < controllers.size(); ++c) {
      double cost = squared_distance(instance.position(i), instance.position(controllers[c]));
      if (kind == SolverKind::LeaderLess) cost += gamma * node_sync[c];
      if (cost < best_cost) {
        best_cost = cost;
        best_slot = static_cast<int>(c);
      }
    }
    pl.assignment[static_cast<size_t>(i)] = controllers[static_cast<size_t>(best_slot)];
  }

  if (kind == SolverKind::LeaderBased) {
    size_t best = 0;
    for (size_t c = 1; c < controllers.size(); ++c)
      if (node_sync[c] < node_sync[best]) best = c;
    pl.leader = controllers[best];
    pl.objective = evaluate_lb(instance, pl);
  } else {
    pl.objective = evaluate_ll(instance, pl);
  }
  return pl;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,temperature,distortion,entropy,free_energy,effective_centroids\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << format_double(r.temperature) << ',' << format_double(r.distortion)
        << ',' << format_double(r.entropy) << ',' << format_double(r.free_energy) << ','
        << r.effective_centroids << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ecp
