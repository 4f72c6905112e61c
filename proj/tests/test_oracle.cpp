#include <vector>

#include "core/network_model.hpp"
#include "core/oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ecp;
using ecp::testing::line_instance;

TEST_CASE("exact search breaks objective ties lexicographically") {
  // Two nodes far apart with a dominant sync weight: both singletons cost
  // exactly 100, the pair costs 2000. The smaller controller set wins.
  const NetworkInstance inst = line_instance({0.0, 10.0}, 10.0);

  const OracleResult ll = solve_exact_ll(inst, 2);
  CHECK(ll.placement.controllers == std::vector<int>{0});
  CHECK(ll.placement.objective.total == 100.0);
  CHECK(ll.subsets_enumerated == 3);
  CHECK_FALSE(ll.placement.leader.has_value());
  CHECK_NOTHROW(validate_placement(inst, ll.placement));

  const OracleResult lb = solve_exact_lb(inst, 2);
  CHECK(lb.placement.controllers == std::vector<int>{0});
  CHECK(lb.placement.objective.total == 100.0);
  REQUIRE(lb.placement.leader.has_value());
  CHECK(*lb.placement.leader == 0);
}

TEST_CASE("exact search finds the two-cluster optimum") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 100.0, 101.0}, 0.01);

  const OracleResult ll = solve_exact_ll(inst, 2);
  CHECK(ll.placement.controllers == std::vector<int>{1, 2});
  CHECK(ll.placement.assignment == std::vector<int>{1, 1, 2, 2});
  CHECK(ll.placement.objective.delay_cost == 2.0);
  CHECK(ll.placement.objective.total == doctest::Approx(394.04).epsilon(1e-12));
  CHECK(ll.subsets_enumerated == 10);
  CHECK(ll.placement.objective.total == evaluate_ll(inst, ll.placement).total);

  const OracleResult lb = solve_exact_lb(inst, 2);
  CHECK(lb.placement.controllers == std::vector<int>{1, 2});
  REQUIRE(lb.placement.leader.has_value());
  CHECK(*lb.placement.leader == 1);  // leader sync tie resolves to the lower node
  CHECK(lb.placement.objective.total == doctest::Approx(394.04).epsilon(1e-12));
  CHECK(lb.placement.objective.total == evaluate_lb(inst, lb.placement).total);
}

TEST_CASE("exact search respects the candidate set") {
  NetworkInstance inst = line_instance({0.0, 1.0, 10.0, 11.0}, 0.0);
  inst.candidates = {1, 2};

  const OracleResult ll = solve_exact_ll(inst, 2);
  CHECK(ll.placement.controllers == std::vector<int>{1, 2});
  CHECK(ll.placement.objective.total == 2.0);
  CHECK(ll.subsets_enumerated == 3);
}

TEST_CASE("assignment ties go to the lowest controller") {
  // Node 1 sits exactly between the two controllers.
  NetworkInstance inst = line_instance({0.0, 1.0, 2.0}, 0.0);
  inst.candidates = {0, 2};
  const OracleResult ll = solve_exact_ll(inst, 2);
  CHECK(ll.placement.controllers == std::vector<int>{0, 2});
  CHECK(ll.placement.assignment == std::vector<int>{0, 0, 2});
}

TEST_CASE("controller cap limits the search") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 100.0, 101.0}, 0.01);
  const OracleResult best_single = solve_exact_ll(inst, 1);
  CHECK(best_single.placement.controllers.size() == 1);
  CHECK(best_single.subsets_enumerated == 4);

  // A cap beyond the candidate count clamps to the candidate count.
  const OracleResult all = solve_exact_ll(inst, 9);
  CHECK(all.subsets_enumerated == 15);
  CHECK_THROWS_AS(solve_exact_ll(inst, 0), ValidationError);
}

TEST_CASE("exact search rejects large candidate sets") {
  std::vector<double> xs(21);
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  const NetworkInstance inst = line_instance(xs, 0.1);
  CHECK_THROWS_AS(solve_exact_ll(inst, 2), InfeasibleError);
  CHECK_THROWS_AS(solve_exact_lb(inst, 2), InfeasibleError);
}
