#include <filesystem>
#include <fstream>

#include "core/network_model.hpp"
#include "core/types.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ecp;
using ecp::testing::line_instance;
using ecp::testing::temp_file;

TEST_CASE("squared distance") {
  const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(squared_distance(a, b) == 25.0);
  const std::vector<double> c{1.0, 1.0}, d{2.0, 3.0};
  CHECK(squared_distance(c, d) == 5.0);
  const std::vector<double> e{1.0};
  CHECK_THROWS_AS(squared_distance(a, e), ValidationError);
}

TEST_CASE("instance validation") {
  NetworkInstance good = line_instance({0.0, 1.0, 2.0}, 0.5);
  CHECK_NOTHROW(good.validate());
  CHECK(good.is_candidate(1));
  CHECK_FALSE(good.is_candidate(3));

  NetworkInstance inst = good;
  inst.dimension = 0;
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.nodes.clear();
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.gamma = -0.1;
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.nodes[1].position = {0.0, 0.0};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.nodes[0].weight = 0.0;
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.nodes[0].weight = 0.9;  // weights no longer sum to one
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.candidates = {};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.candidates = {0, 3};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst = good;
  inst.candidates = {1, 0};
  CHECK_THROWS_AS(inst.validate(), ValidationError);
}

TEST_CASE("leaderless objective") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 10.0, 11.0}, 0.1);
  Placement pl;
  pl.controllers = {0, 2};
  pl.assignment = {0, 0, 2, 2};
  const ObjectiveBreakdown obj = evaluate_ll(inst, pl);
  CHECK(obj.delay_cost == 2.0);
  CHECK(obj.sync_cost == 400.0);
  CHECK(obj.total == doctest::Approx(42.0).epsilon(1e-12));

  pl.assignment = {0, 0, 2, 3};  // node 3 is not a controller
  CHECK_THROWS_AS(evaluate_ll(inst, pl), ValidationError);
}

TEST_CASE("leader-based objective") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 10.0, 11.0}, 0.1);
  Placement pl;
  pl.controllers = {0, 2};
  pl.assignment = {0, 0, 2, 2};
  CHECK_THROWS_AS(evaluate_lb(inst, pl), ValidationError);  // leader missing

  pl.leader = 0;
  const ObjectiveBreakdown obj = evaluate_lb(inst, pl);
  CHECK(obj.delay_cost == 2.0);
  CHECK(obj.sync_cost == 400.0);  // 4 nodes x d(10, 0)^2
  CHECK(obj.total == doctest::Approx(42.0).epsilon(1e-12));

  pl.leader = 1;  // not a controller
  CHECK_THROWS_AS(evaluate_lb(inst, pl), ValidationError);
}

TEST_CASE("placement validation") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 10.0, 11.0}, 0.1);
  Placement pl;
  pl.controllers = {0, 2};
  pl.assignment = {0, 0, 2, 2};
  pl.objective = evaluate_ll(inst, pl);
  CHECK_NOTHROW(validate_placement(inst, pl));
  CHECK_THROWS_AS(validate_placement(inst, pl, /*require_leader=*/true), ValidationError);

  Placement bad = pl;
  bad.objective.total += 1.0;
  CHECK_THROWS_AS(validate_placement(inst, bad), ValidationError);

  bad = pl;
  bad.controllers = {2, 0};
  CHECK_THROWS_AS(validate_placement(inst, bad), ValidationError);

  NetworkInstance restricted = inst;
  restricted.candidates = {1, 2, 3};
  CHECK_THROWS_AS(validate_placement(restricted, pl), ValidationError);
}

TEST_CASE("gaussian generator") {
  GeneratorParams params;
  params.clusters = 3;
  params.size = 12;
  params.dimension = 2;
  params.seed = 5;
  params.gamma = 0.25;

  GenerationInfo info;
  const NetworkInstance inst = generate_gaussian_instance(params, &info);
  CHECK(inst.size() == 12);
  CHECK(inst.dimension == 2);
  CHECK(inst.gamma == 0.25);
  CHECK(inst.candidates.size() == 12);
  CHECK(info.centers.size() == 3);
  REQUIRE(info.labels.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(info.labels[static_cast<size_t>(i)] == i % 3);
  for (const auto& c : info.centers)
    for (double x : c) {
      CHECK(x >= 0.0);
      CHECK(x <= 10.0);
    }

  const NetworkInstance again = generate_gaussian_instance(params);
  for (int i = 0; i < inst.size(); ++i) {
    CHECK(inst.nodes[static_cast<size_t>(i)].position ==
          again.nodes[static_cast<size_t>(i)].position);
  }

  params.seed = 6;
  const NetworkInstance other = generate_gaussian_instance(params);
  CHECK(inst.nodes[0].position != other.nodes[0].position);

  params.clusters = 0;
  CHECK_THROWS_AS(generate_gaussian_instance(params), ValidationError);
  params.clusters = 3;
  params.size = 2;
  CHECK_THROWS_AS(generate_gaussian_instance(params), ValidationError);
}

TEST_CASE("instance round trip") {
  GeneratorParams params;
  params.clusters = 2;
  params.size = 8;
  params.seed = 11;
  const NetworkInstance inst = generate_gaussian_instance(params);
  const std::string path = temp_file("instance_roundtrip.json");
  save_instance(inst, path);
  const NetworkInstance loaded = load_instance(path);
  CHECK(loaded.dimension == inst.dimension);
  CHECK(loaded.gamma == inst.gamma);
  CHECK(loaded.candidates == inst.candidates);
  REQUIRE(loaded.size() == inst.size());
  for (int i = 0; i < inst.size(); ++i) {
    CHECK(loaded.nodes[static_cast<size_t>(i)].position ==
          inst.nodes[static_cast<size_t>(i)].position);
    CHECK(loaded.nodes[static_cast<size_t>(i)].weight ==
          inst.nodes[static_cast<size_t>(i)].weight);
  }

  CHECK_THROWS_AS(load_instance(temp_file("does_not_exist.json")), IoError);

  const std::string garbage = temp_file("garbage.json");
  std::ofstream(garbage) << "not json at all {";
  CHECK_THROWS_AS(load_instance(garbage), IoError);
}

TEST_CASE("instance load defaults weights to uniform") {
  const std::string path = temp_file("weightless.json");
  std::ofstream(path) << R"({"dimension":1,"gamma":0.0,)"
                      << R"("nodes":[[0.0],[1.0],[2.0],[3.0]],"candidates":[0,1,2,3]})";
  const NetworkInstance inst = load_instance(path);
  for (int i = 0; i < inst.size(); ++i) CHECK(inst.weight(i) == 0.25);
}

TEST_CASE("placement round trip") {
  const NetworkInstance inst = line_instance({0.0, 1.0, 10.0, 11.0}, 0.1);
  Placement pl;
  pl.controllers = {0, 2};
  pl.assignment = {0, 0, 2, 2};
  pl.leader = 2;
  pl.objective = evaluate_lb(inst, pl);

  const std::string path = temp_file("placement_roundtrip.json");
  save_placement(pl, path);
  const Placement loaded = load_placement(path, inst);
  CHECK(loaded.controllers == pl.controllers);
  CHECK(loaded.assignment == pl.assignment);
  REQUIRE(loaded.leader.has_value());
  CHECK(*loaded.leader == 2);
  CHECK(loaded.objective.total == pl.objective.total);

  pl.leader.reset();
  pl.objective = evaluate_ll(inst, pl);
  save_placement(pl, path);
  const Placement leaderless = load_placement(path);
  CHECK_FALSE(leaderless.leader.has_value());

  const std::string bad = temp_file("bad_placement.json");
  std::ofstream(bad) << R"({"controllers":[0,2],"assignment":[0,0,2,1],"leader":null,)"
                     << R"("objective":{"delay_cost":0,"sync_cost":0,"total":0}})";
  CHECK_THROWS_AS(load_placement(bad), ValidationError);
}
