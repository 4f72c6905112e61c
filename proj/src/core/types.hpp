#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecp {

// Domain invariant broken: bad instance, bad placement, bad configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem or serialization failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally sound request that cannot be served (e.g. exact search
// beyond the enumeration cap).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cluster lost all of its association mass. Run loops catch this and
// drop the centroid; it escapes only when there is nothing left to drop.
class DegenerateClusterError : public std::runtime_error {
 public:
  DegenerateClusterError(int cluster, const std::string& what)
      : std::runtime_error(what), cluster_(cluster) {}
  int cluster() const { return cluster_; }

 private:
  int cluster_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

struct EdgeNode {
  std::vector<double> position;
  double weight = 0.0;
};

struct ObjectiveBreakdown {
  double delay_cost = 0.0;
  double sync_cost = 0.0;
  double total = 0.0;  // delay_cost + gamma * sync_cost
};

struct NetworkInstance {
  int dimension = 0;
  double gamma = 0.0;
  std::vector<EdgeNode> nodes;
  std::vector<int> candidates;  // sorted, unique, non-empty

  int size() const { return static_cast<int>(nodes.size()); }
  std::span<const double> position(int i) const { return nodes[static_cast<size_t>(i)].position; }
  double weight(int i) const { return nodes[static_cast<size_t>(i)].weight; }
  bool is_candidate(int i) const;
  void validate() const;  // throws ValidationError
};

struct Placement {
  std::vector<int> controllers;  // sorted unique node indices
  std::vector<int> assignment;   // node -> controller node index
  std::optional<int> leader;     // leader-based placements only
  ObjectiveBreakdown objective;
};

// Internal consistency of the placement plus consistency with the instance
// (controllers drawn from the candidate set, assignment shape, leader rules).
void validate_placement(const NetworkInstance& instance, const Placement& placement,
                        bool require_leader = false);

}  // namespace ecp
