#include "core/phase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "core/csv.hpp"
#include "core/da_driver.hpp"

namespace ecp {

namespace {

constexpr double kBisectRelTol = 1e-6;

double equilibrated_det(const NetworkInstance& inst, AnnealState& state,
                        const ResolvedSchedule& resolved, double temperature, long long& iter) {
  state.temperature = temperature;
  detail::equilibrate(inst, state, resolved, SolverKind::LeaderLess, nullptr, iter);
  const PhaseBlocks blocks = build_blocks(inst, state.centroids, state.associations, inst.gamma);
  return critical_matrix(blocks, temperature).determinant();
}

double refine_bracket(const NetworkInstance& inst, const AnnealState& hot_state,
                      const ResolvedSchedule& resolved, double t_hot, double det_hot,
                      double t_cold, long long& iter) {
  AnnealState hot = hot_state;
  while (t_hot / t_cold > 1.0 + kBisectRelTol) {
    const double mid = std::sqrt(t_hot * t_cold);
    AnnealState trial = hot;
    const double det_mid = equilibrated_det(inst, trial, resolved, mid, iter);
    if ((det_mid > 0.0) == (det_hot > 0.0) && det_mid != 0.0) {
      t_hot = mid;
      det_hot = det_mid;
      hot = std::move(trial);
    } else {
      t_cold = mid;
    }
  }
  return std::sqrt(t_hot * t_cold);
}

// Effective centroid counts against log-temperature, taken from the last
// record of each temperature slice of a reference run.
std::vector<std::pair<double, int>> reference_counts(const NetworkInstance& inst,
                                                     const ScheduleConfig& config, uint64_t seed) {
  const RunResult reference = detail::run_annealing(inst, config, SolverKind::LeaderLess, seed);
  std::vector<std::pair<double, int>> counts;
  for (const auto& rec : reference.trace) {
    if (!counts.empty() && counts.back().first == rec.temperature)
      counts.back().second = rec.effective_centroids;
    else
      counts.emplace_back(rec.temperature, rec.effective_centroids);
  }
  return counts;
}

int nearest_count(const std::vector<std::pair<double, int>>& counts, double temperature) {
  int best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& [t, eff] : counts) {
    const double gap = std::abs(std::log(t) - std::log(temperature));
    if (gap < best_gap) {
      best_gap = gap;
      best = eff;
    }
  }
  return best;
}

PhaseScanResult scan(const NetworkInstance& inst, const ScheduleConfig& config,
                     const std::vector<double>& grid, uint64_t seed) {
  inst.validate();
  if (grid.size() < 2) throw ValidationError("phase scan requires at least two grid temperatures");
  for (size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] > 0.0)) throw ValidationError("phase scan temperatures must be > 0");
    if (g > 0 && grid[g] >= grid[g - 1])
      throw ValidationError("phase scan grid must be strictly descending");
  }

  const ResolvedSchedule resolved = resolve_schedule(config, inst);
  const std::vector<std::pair<double, int>> counts = reference_counts(inst, config, seed);

  PhaseScanResult out;
  AnnealState state = initialize(inst, resolved);
  AnnealState prev_state = state;
  double prev_det = 0.0;
  long long iter = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    const double det = equilibrated_det(inst, state, resolved, grid[g], iter);
    out.points.push_back({grid[g], det, nearest_count(counts, grid[g])});
    if (det == 0.0) {
      out.critical_temperatures.push_back(grid[g]);
    } else if (g > 0 && prev_det != 0.0 && (prev_det > 0.0) != (det > 0.0)) {
      out.critical_temperatures.push_back(refine_bracket(inst, prev_state, resolved, grid[g - 1],
                                                         prev_det, grid[g], iter));
    }
    prev_det = det;
    prev_state = state;
  }
  return out;
}

}  // namespace

PhaseBlocks build_blocks(const NetworkInstance& instance, const CentroidSet& centroids,
                         const AssociationMatrix& associations, double gamma) {
  const int n = instance.size();
  const int m = centroids.count();
  const int d = instance.dimension;
  if (associations.rows != n || associations.cols != m)
    throw ValidationError("phase blocks: association shape mismatch");
  const Eigen::Index size = static_cast<Eigen::Index>(m) * d;

  std::vector<double> pi(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      pi[static_cast<size_t>(j)] += instance.weight(i) * associations.at(i, j);

  PhaseBlocks blocks;
  blocks.stable = Eigen::MatrixXd::Zero(size, size);
  blocks.scaled = Eigen::MatrixXd::Zero(size, size);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double v = -2.0 * gamma * pi[static_cast<size_t>(j)];
      if (j == k) v += (1.0 + m * gamma) * pi[static_cast<size_t>(j)] + gamma;
      for (int t = 0; t < d; ++t)
        blocks.stable(static_cast<Eigen::Index>(j) * d + t,
                      static_cast<Eigen::Index>(k) * d + t) = v;
    }

  // Row vector t_ji per (centroid, node) pair; the scaled part accumulates
  // 2 * w_i * p_ij * t_ji^T t_ji.
  std::vector<std::vector<double>> g(static_cast<size_t>(m),
                                     std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      for (int t = 0; t < d; ++t)
        g[static_cast<size_t>(j)][static_cast<size_t>(t)] +=
            centroids.positions[static_cast<size_t>(j)][static_cast<size_t>(t)] -
            centroids.positions[static_cast<size_t>(k)][static_cast<size_t>(t)];

  Eigen::VectorXd t_ji(size);
  for (int i = 0; i < n; ++i) {
    const auto pos = instance.position(i);
    const double wi = instance.weight(i);
    for (int j = 0; j < m; ++j) {
      const double pij = associations.at(i, j);
      if (pij == 0.0) continue;
      t_ji.setZero();
      const auto& yj = centroids.positions[static_cast<size_t>(j)];
      for (int t = 0; t < d; ++t)
        t_ji(static_cast<Eigen::Index>(j) * d + t) =
            yj[static_cast<size_t>(t)] - pos[t] +
            gamma * g[static_cast<size_t>(j)][static_cast<size_t>(t)];
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        const auto& yk = centroids.positions[static_cast<size_t>(k)];
        for (int t = 0; t < d; ++t)
          t_ji(static_cast<Eigen::Index>(k) * d + t) =
              -gamma * (yj[static_cast<size_t>(t)] - yk[static_cast<size_t>(t)]);
      }
      blocks.scaled.noalias() += (2.0 * wi * pij) * (t_ji * t_ji.transpose());
    }
  }
  return blocks;
}

Eigen::MatrixXd critical_matrix(const PhaseBlocks& blocks, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("critical matrix requires temperature > 0");
  return blocks.stable - blocks.scaled / temperature;
}

PhaseScanResult find_critical_temperatures(const NetworkInstance& instance,
                                           const ScheduleConfig& config, int grid_points,
                                           uint64_t seed) {
  if (grid_points < 2) throw ValidationError("phase scan requires at least two grid points");
  const ResolvedSchedule resolved = resolve_schedule(config, instance);
  std::vector<double> grid(static_cast<size_t>(grid_points));
  const double ratio = resolved.t_min / resolved.t_max;
  for (int g = 0; g < grid_points; ++g)
    grid[static_cast<size_t>(g)] =
        resolved.t_max * std::pow(ratio, static_cast<double>(g) / (grid_points - 1));
  return scan(instance, config, grid, seed);
}

PhaseScanResult find_critical_temperatures(const NetworkInstance& instance,
                                           const ScheduleConfig& config,
                                           const std::vector<double>& grid, uint64_t seed) {
  return scan(instance, config, grid, seed);
}

void write_phase_csv(const PhaseScanResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "temperature,det,effective_centroids\n";
  for (const auto& p : result.points)
    out << format_double(p.temperature) << ',' << format_double(p.det) << ','
        << p.effective_centroids << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ecp
