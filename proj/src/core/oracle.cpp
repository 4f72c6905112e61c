#include "core/oracle.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <vector>

#include "core/network_model.hpp"

namespace ecp {

namespace {

constexpr int kMaxCandidates = 20;

struct Tables {
  int n = 0;
  int c = 0;
  std::vector<double> node_cand;  // n x c squared distances
  std::vector<double> cand_cand;  // c x c squared distances
};

Tables build_tables(const NetworkInstance& inst) {
  Tables t;
  t.n = inst.size();
  t.c = static_cast<int>(inst.candidates.size());
  t.node_cand.resize(static_cast<size_t>(t.n) * t.c);
  t.cand_cand.resize(static_cast<size_t>(t.c) * t.c);
  for (int i = 0; i < t.n; ++i)
    for (int a = 0; a < t.c; ++a)
      t.node_cand[static_cast<size_t>(i) * t.c + a] =
          squared_distance(inst.position(i), inst.position(inst.candidates[static_cast<size_t>(a)]));
  for (int a = 0; a < t.c; ++a)
    for (int b = 0; b < t.c; ++b)
      t.cand_cand[static_cast<size_t>(a) * t.c + b] =
          a == b ? 0.0
                 : squared_distance(inst.position(inst.candidates[static_cast<size_t>(a)]),
                                    inst.position(inst.candidates[static_cast<size_t>(b)]));
  return t;
}

// Sync sums recomputed from scratch in member order, so that equal subsets
// always produce bit-identical objectives and exact ties stay meaningful.
std::vector<double> subset_sync(const Tables& t, const std::vector<int>& members) {
  std::vector<double> s(members.size(), 0.0);
  for (size_t a = 0; a < members.size(); ++a)
    for (size_t b = 0; b < members.size(); ++b)
      if (a != b)
        s[a] += t.cand_cand[static_cast<size_t>(members[a]) * t.c + members[b]];
  return s;
}

Placement rebuild_placement(const NetworkInstance& inst, const Tables& t,
                            const std::vector<int>& members, bool leader_based,
                            int leader_member) {
  Placement pl;
  pl.controllers.reserve(members.size());
  for (int a : members) pl.controllers.push_back(inst.candidates[static_cast<size_t>(a)]);
  const std::vector<double> s = subset_sync(t, members);
  pl.assignment.resize(static_cast<size_t>(t.n));
  for (int i = 0; i < t.n; ++i) {
    size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < members.size(); ++a) {
      double cost = t.node_cand[static_cast<size_t>(i) * t.c + members[a]];
      if (!leader_based) cost += inst.gamma * s[a];
      if (cost < best_cost) {
        best_cost = cost;
        best = a;
      }
    }
    pl.assignment[static_cast<size_t>(i)] = pl.controllers[best];
  }
  if (leader_based) {
    pl.leader = inst.candidates[static_cast<size_t>(members[static_cast<size_t>(leader_member)])];
    pl.objective = evaluate_lb(inst, pl);
  } else {
    pl.objective = evaluate_ll(inst, pl);
  }
  return pl;
}

OracleResult solve_exact(const NetworkInstance& inst, int max_controllers, bool leader_based) {
  inst.validate();
  if (max_controllers < 1) throw ValidationError("oracle: max_controllers must be >= 1");
  const int c = static_cast<int>(inst.candidates.size());
  if (c > kMaxCandidates)
    throw InfeasibleError("exhaustive search is limited to " +
                          std::to_string(kMaxCandidates) + " candidates, instance has " +
                          std::to_string(c));
  const int cap = std::min(max_controllers, c);
  const Tables t = build_tables(inst);

  double best_total = std::numeric_limits<double>::infinity();
  std::vector<int> best_members;
  int best_leader = -1;
  long long evaluated = 0;
  std::vector<int> members;
  members.reserve(static_cast<size_t>(cap));

  const uint32_t limit = 1u << c;
  for (uint32_t mask = 1; mask < limit; ++mask) {
    if (std::popcount(mask) > cap) continue;
    members.clear();
    for (int a = 0; a < c; ++a)
      if (mask & (1u << a)) members.push_back(a);
    ++evaluated;

    const std::vector<double> s = subset_sync(t, members);
    double total = 0.0;
    int leader_member = 0;
    if (leader_based) {
      for (int i = 0; i < t.n; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        for (int a : members) lo = std::min(lo, t.node_cand[static_cast<size_t>(i) * t.c + a]);
        total += lo;
      }
      for (size_t a = 1; a < members.size(); ++a)
        if (s[a] < s[static_cast<size_t>(leader_member)]) leader_member = static_cast<int>(a);
      total += inst.gamma * t.n * s[static_cast<size_t>(leader_member)];
    } else {
      for (int i = 0; i < t.n; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < members.size(); ++a)
          lo = std::min(lo, t.node_cand[static_cast<size_t>(i) * t.c + members[a]] +
                                inst.gamma * s[a]);
        total += lo;
      }
    }

    bool take = total < best_total;
    if (!take && total == best_total) {
      std::vector<int> ids, best_ids;
      for (int a : members) ids.push_back(inst.candidates[static_cast<size_t>(a)]);
      for (int a : best_members) best_ids.push_back(inst.candidates[static_cast<size_t>(a)]);
      take = std::lexicographical_compare(ids.begin(), ids.end(), best_ids.begin(), best_ids.end());
    }
    if (take) {
      best_total = total;
      best_members = members;
      best_leader = leader_member;
    }
  }

  OracleResult out;
  out.subsets_enumerated = evaluated;
  out.placement = rebuild_placement(inst, t, best_members, leader_based, best_leader);
  return out;
}

}  // namespace

OracleResult solve_exact_ll(const NetworkInstance& instance, int max_controllers) {
  return solve_exact(instance, max_controllers, false);
}

OracleResult solve_exact_lb(const NetworkInstance& instance, int max_controllers) {
  return solve_exact(instance, max_controllers, true);
}

}  // namespace ecp
