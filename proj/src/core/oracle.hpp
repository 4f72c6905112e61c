#pragma once

#include "core/types.hpp"

namespace ecp {

struct OracleResult {
  Placement placement;
  long long subsets_enumerated = 0;
};

// Exhaustive search over all candidate subsets of size 1..max_controllers.
// Rejects instances with more than 20 candidates. Exact objective ties
// resolve to the lexicographically smallest controller set (and then the
// lowest leader for the leader-based variant).
OracleResult solve_exact_ll(const NetworkInstance& instance, int max_controllers);
OracleResult solve_exact_lb(const NetworkInstance& instance, int max_controllers);

}  // namespace ecp

