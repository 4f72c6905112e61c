#include "core/ecp_ll.hpp"

#include <cmath>

#include "core/da_driver.hpp"

namespace ecp {

namespace {

constexpr double kMassFloor = 1e-300;

}  // namespace

AssociationMatrix ll_association_update(const IterationContext& ctx, double gamma,
                                        double temperature) {
  std::vector<double> addend(static_cast<size_t>(ctx.m));
  for (int j = 0; j < ctx.m; ++j)
    addend[static_cast<size_t>(j)] = gamma * ctx.sync_sum[static_cast<size_t>(j)];
  return detail::boltzmann_rows(ctx, addend, temperature);
}

AssociationMatrix posterior(const AssociationMatrix& associations,
                            const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != associations.rows)
    throw ValidationError("posterior: weights length differs from association rows");
  AssociationMatrix post;
  post.rows = associations.rows;
  post.cols = associations.cols;
  post.values.resize(associations.values.size());
  std::vector<double> mass(static_cast<size_t>(associations.cols), 0.0);
  for (int i = 0; i < associations.rows; ++i)
    for (int j = 0; j < associations.cols; ++j)
      mass[static_cast<size_t>(j)] += associations.at(i, j) * weights[static_cast<size_t>(i)];
  for (int j = 0; j < associations.cols; ++j)
    if (mass[static_cast<size_t>(j)] < kMassFloor)
      throw DegenerateClusterError(j, "cluster " + std::to_string(j) +
                                          " carries no association mass");
  for (int i = 0; i < associations.rows; ++i)
    for (int j = 0; j < associations.cols; ++j)
      post.at(i, j) =
          associations.at(i, j) * weights[static_cast<size_t>(i)] / mass[static_cast<size_t>(j)];
  return post;
}

CentroidSet ll_centroid_solve(const AssociationMatrix& posterior_matrix,
                              const NetworkInstance& instance, double gamma) {
  if (posterior_matrix.rows != instance.size())
    throw ValidationError("centroid solve: posterior rows differ from node count");
  const int m = posterior_matrix.cols;
  const int d = instance.dimension;
  std::vector<std::vector<double>> c(static_cast<size_t>(m),
                                     std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int i = 0; i < posterior_matrix.rows; ++i) {
    const auto pos = instance.position(i);
    for (int j = 0; j < m; ++j) {
      const double pj = posterior_matrix.at(i, j);
      auto& cj = c[static_cast<size_t>(j)];
      for (int k = 0; k < d; ++k) cj[static_cast<size_t>(k)] += pj * pos[k];
    }
  }
  std::vector<double> total(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k)
      total[static_cast<size_t>(k)] += c[static_cast<size_t>(j)][static_cast<size_t>(k)];
  const double denom = gamma * m + 1.0;
  CentroidSet out;
  out.positions.resize(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& y = out.positions[static_cast<size_t>(j)];
    y.resize(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k)
      y[static_cast<size_t>(k)] =
          (c[static_cast<size_t>(j)][static_cast<size_t>(k)] + gamma * total[static_cast<size_t>(k)]) /
          denom;
  }
  return out;
}

CentroidSet ll_centroid_solve_dense(const AssociationMatrix& posterior_matrix,
                                    const NetworkInstance& instance, double gamma) {
  if (posterior_matrix.rows != instance.size())
    throw ValidationError("centroid solve: posterior rows differ from node count");
  const int m = posterior_matrix.cols;
  const int d = instance.dimension;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m) * d);
  for (int i = 0; i < posterior_matrix.rows; ++i) {
    const auto pos = instance.position(i);
    for (int j = 0; j < m; ++j) {
      const double pj = posterior_matrix.at(i, j);
      for (int k = 0; k < d; ++k) rhs(static_cast<Eigen::Index>(j) * d + k) += pj * pos[k];
    }
  }
  const Eigen::MatrixXd coeff = ll_coefficient_matrix(m, d, gamma);
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

Eigen::MatrixXd ll_coefficient_matrix(int m, int dimension, double gamma) {
  if (m < 1 || dimension < 1)
    throw ValidationError("coefficient matrix requires m >= 1 and dimension >= 1");
  const Eigen::Index size = static_cast<Eigen::Index>(m) * dimension;
  const double eta = gamma * (m - 1) + 1.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const double v = j == k ? eta : -gamma;
      for (int t = 0; t < dimension; ++t)
        a(static_cast<Eigen::Index>(j) * dimension + t,
          static_cast<Eigen::Index>(k) * dimension + t) = v;
    }
  return a;
}

double ll_coefficient_determinant(int m, int dimension, double gamma) {
  if (m < 1 || dimension < 1)
    throw ValidationError("coefficient determinant requires m >= 1 and dimension >= 1");
  return std::pow(gamma * m + 1.0, static_cast<double>((m - 1) * dimension));
}

RunResult run_ecp_ll(const NetworkInstance& instance, const ScheduleConfig& config,
                     uint64_t seed) {
  return detail::run_annealing(instance, config, SolverKind::LeaderLess, seed);
}

}  // namespace ecp
