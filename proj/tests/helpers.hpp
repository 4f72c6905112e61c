#pragma once

#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace ecp::testing {

// 1-d instance with uniform weights; every node is a candidate.
inline NetworkInstance line_instance(const std::vector<double>& xs, double gamma) {
  NetworkInstance inst;
  inst.dimension = 1;
  inst.gamma = gamma;
  const double w = 1.0 / static_cast<double>(xs.size());
  for (double x : xs) inst.nodes.push_back({{x}, w});
  inst.candidates.resize(xs.size());
  std::iota(inst.candidates.begin(), inst.candidates.end(), 0);
  return inst;
}

inline NetworkInstance point_instance(const std::vector<std::vector<double>>& points,
                                      double gamma) {
  NetworkInstance inst;
  inst.dimension = static_cast<int>(points.front().size());
  inst.gamma = gamma;
  const double w = 1.0 / static_cast<double>(points.size());
  for (const auto& p : points) inst.nodes.push_back({p, w});
  inst.candidates.resize(points.size());
  std::iota(inst.candidates.begin(), inst.candidates.end(), 0);
  return inst;
}

inline std::string temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ecp_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace ecp::testing
