#include "core/ecp_lb.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "core/da_driver.hpp"

namespace ecp {

namespace {

constexpr double kMassFloor = 1e-300;

struct Moments {
  std::vector<double> mass;                  // per-centroid association mass
  std::vector<std::vector<double>> moment;   // per-centroid first moment
};

Moments collect_moments(const AssociationMatrix& associations, const NetworkInstance& instance) {
  if (associations.rows != instance.size())
    throw ValidationError("centroid update: association rows differ from node count");
  const int m = associations.cols;
  const int d = instance.dimension;
  Moments mo;
  mo.mass.assign(static_cast<size_t>(m), 0.0);
  mo.moment.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int i = 0; i < associations.rows; ++i) {
    const auto pos = instance.position(i);
    for (int j = 0; j < m; ++j) {
      const double pj = associations.at(i, j);
      mo.mass[static_cast<size_t>(j)] += pj;
      auto& b = mo.moment[static_cast<size_t>(j)];
      for (int k = 0; k < d; ++k) b[static_cast<size_t>(k)] += pj * pos[k];
    }
  }
  for (int j = 0; j < m; ++j)
    if (mo.mass[static_cast<size_t>(j)] < kMassFloor)
      throw DegenerateClusterError(j, "cluster " + std::to_string(j) +
                                          " carries no association mass");
  return mo;
}

void check_leader(int leader, int m) {
  if (leader < 0 || leader >= m) throw ValidationError("leader index out of range");
}

}  // namespace

int leader_index(const IterationContext& ctx) {
  if (ctx.m < 1) throw ValidationError("leader selection requires at least one centroid");
  int best = 0;
  for (int j = 1; j < ctx.m; ++j)
    if (ctx.sync_sum[static_cast<size_t>(j)] < ctx.sync_sum[static_cast<size_t>(best)]) best = j;
  return best;
}

AssociationMatrix lb_association_update(const IterationContext& ctx, double temperature) {
  const std::vector<double> addend(static_cast<size_t>(ctx.m), 0.0);
  return detail::boltzmann_rows(ctx, addend, temperature);
}

CentroidSet lb_centroid_update(const AssociationMatrix& associations,
                               const NetworkInstance& instance, int leader, double gamma) {
  const int m = associations.cols;
  const int d = instance.dimension;
  check_leader(leader, m);
  const Moments mo = collect_moments(associations, instance);
  const double gn = gamma * instance.size();

  double sum_frac = 0.0;
  std::vector<double> acc(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < m; ++j) {
    if (j == leader) continue;
    const double denom = gn + mo.mass[static_cast<size_t>(j)];
    sum_frac += gn / denom;
    for (int k = 0; k < d; ++k)
      acc[static_cast<size_t>(k)] += mo.moment[static_cast<size_t>(j)][static_cast<size_t>(k)] / denom;
  }
  const double coef = mo.mass[static_cast<size_t>(leader)] + gn * (m - 1) - gn * sum_frac;

  CentroidSet out;
  out.positions.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(d), 0.0));
  auto& yl = out.positions[static_cast<size_t>(leader)];
  for (int k = 0; k < d; ++k)
    yl[static_cast<size_t>(k)] =
        (mo.moment[static_cast<size_t>(leader)][static_cast<size_t>(k)] +
         gn * acc[static_cast<size_t>(k)]) /
        coef;
  for (int j = 0; j < m; ++j) {
    if (j == leader) continue;
    const double denom = gn + mo.mass[static_cast<size_t>(j)];
    auto& yj = out.positions[static_cast<size_t>(j)];
    for (int k = 0; k < d; ++k)
      yj[static_cast<size_t>(k)] =
          (gn * yl[static_cast<size_t>(k)] +
           mo.moment[static_cast<size_t>(j)][static_cast<size_t>(k)]) /
          denom;
  }
  return out;
}

CentroidSet lb_centroid_update_dense(const AssociationMatrix& associations,
                                     const NetworkInstance& instance, int leader, double gamma) {
  const int m = associations.cols;
  const int d = instance.dimension;
  check_leader(leader, m);
  const Moments mo = collect_moments(associations, instance);
  const double gn = gamma * instance.size();

  const Eigen::Index size = static_cast<Eigen::Index>(m) * d;
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs(size);
  for (int j = 0; j < m; ++j) {
    const double diag = j == leader ? mo.mass[static_cast<size_t>(j)] + gn * (m - 1)
                                    : mo.mass[static_cast<size_t>(j)] + gn;
    for (int k = 0; k < d; ++k) {
      const Eigen::Index row = static_cast<Eigen::Index>(j) * d + k;
      coeff(row, row) = diag;
      rhs(row) = mo.moment[static_cast<size_t>(j)][static_cast<size_t>(k)];
      if (j != leader) {
        coeff(row, static_cast<Eigen::Index>(leader) * d + k) = -gn;
      } else {
        for (int o = 0; o < m; ++o)
          if (o != leader) coeff(row, static_cast<Eigen::Index>(o) * d + k) = -gn;
      }
    }
  }
  const Eigen::VectorXd y = coeff.partialPivLu().solve(rhs);
  CentroidSet out;
  out.positions.resize(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& pos = out.positions[static_cast<size_t>(j)];
    pos.resize(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k)
      pos[static_cast<size_t>(k)] = y(static_cast<Eigen::Index>(j) * d + k);
  }
  return out;
}

double lb_stationarity_residual(const AssociationMatrix& associations,
                                const NetworkInstance& instance, const CentroidSet& centroids,
                                int leader, double gamma) {
  const int m = associations.cols;
  const int d = instance.dimension;
  check_leader(leader, m);
  if (centroids.count() != m)
    throw ValidationError("residual: centroid count differs from association columns");
  const Moments mo = collect_moments(associations, instance);
  const double gn = gamma * instance.size();
  const auto& yl = centroids.positions[static_cast<size_t>(leader)];

  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto& yj = centroids.positions[static_cast<size_t>(j)];
    for (int k = 0; k < d; ++k) {
      double r = mo.mass[static_cast<size_t>(j)] * yj[static_cast<size_t>(k)] -
                 mo.moment[static_cast<size_t>(j)][static_cast<size_t>(k)];
      if (j == leader) {
        for (int o = 0; o < m; ++o)
          if (o != leader)
            r += gn * (yl[static_cast<size_t>(k)] -
                       centroids.positions[static_cast<size_t>(o)][static_cast<size_t>(k)]);
      } else {
        r += gn * (yj[static_cast<size_t>(k)] - yl[static_cast<size_t>(k)]);
      }
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

RunResult run_ecp_lb(const NetworkInstance& instance, const ScheduleConfig& config,
                     uint64_t seed) {
  return detail::run_annealing(instance, config, SolverKind::LeaderBased, seed);
}

}  // namespace ecp
