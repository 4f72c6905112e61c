#include "core/types.hpp"

#include <algorithm>
#include <cmath>

namespace ecp {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("squared_distance: dimension mismatch");
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

bool NetworkInstance::is_candidate(int i) const {
  return std::binary_search(candidates.begin(), candidates.end(), i);
}

void NetworkInstance::validate() const {
  if (dimension < 1) throw ValidationError("instance dimension must be positive");
  if (nodes.empty()) throw ValidationError("instance has no nodes");
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
  double weight_sum = 0.0;
  for (const auto& node : nodes) {
    if (static_cast<int>(node.position.size()) != dimension)
      throw ValidationError("node dimension differs from instance dimension");
    if (!(node.weight > 0.0) || node.weight > 1.0)
      throw ValidationError("node weight must lie in (0, 1]");
    weight_sum += node.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw ValidationError("node weights must sum to 1");
  if (candidates.empty()) throw ValidationError("candidate set is empty");
  int prev = -1;
  for (int c : candidates) {
    if (c < 0 || c >= size()) throw ValidationError("candidate index out of range");
    if (c <= prev) throw ValidationError("candidates must be sorted and unique");
    prev = c;
  }
}

void validate_placement(const NetworkInstance& instance, const Placement& placement,
                        bool require_leader) {
  const auto& ctrl = placement.controllers;
  if (ctrl.empty()) throw ValidationError("placement has no controllers");
  int prev = -1;
  for (int c : ctrl) {
    if (c < 0 || c >= instance.size())
      throw ValidationError("controller index out of range");
    if (c <= prev) throw ValidationError("controllers must be sorted and unique");
    if (!instance.is_candidate(c))
      throw ValidationError("controller is not a candidate node");
    prev = c;
  }
  if (static_cast<int>(placement.assignment.size()) != instance.size())
    throw ValidationError("assignment length differs from node count");
  for (int c : placement.assignment)
    if (!std::binary_search(ctrl.begin(), ctrl.end(), c))
      throw ValidationError("assignment to a non-controller node");
  if (placement.leader) {
    if (!std::binary_search(ctrl.begin(), ctrl.end(), *placement.leader))
      throw ValidationError("leader is not a controller");
  } else if (require_leader) {
    throw ValidationError("leader-based placement requires a leader");
  }
  const double recomputed =
      placement.objective.delay_cost + instance.gamma * placement.objective.sync_cost;
  if (std::abs(placement.objective.total - recomputed) >
      1e-9 * std::max(1.0, std::abs(recomputed)))
    throw ValidationError("objective total differs from delay + gamma * sync");
}

}  // namespace ecp
