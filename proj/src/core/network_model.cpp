#include "core/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/rng.hpp"
#include "json.hpp"

namespace ecp {

namespace {

using nlohmann::json;

void check_controllers(const NetworkInstance& inst, const Placement& pl) {
  if (pl.controllers.empty()) throw ValidationError("placement has no controllers");
  int prev = -1;
  for (int c : pl.controllers) {
    if (c < 0 || c >= inst.size()) throw ValidationError("controller index out of range");
    if (c <= prev) throw ValidationError("controllers must be sorted and unique");
    prev = c;
  }
  if (static_cast<int>(pl.assignment.size()) != inst.size())
    throw ValidationError("assignment length differs from node count");
}

int controller_slot(const std::vector<int>& ctrl, int node) {
  auto it = std::lower_bound(ctrl.begin(), ctrl.end(), node);
  if (it == ctrl.end() || *it != node)
    throw ValidationError("assignment to a non-controller node");
  return static_cast<int>(it - ctrl.begin());
}

// Per-controller sum of squared distances to the other controllers.
std::vector<double> controller_sync_sums(const NetworkInstance& inst,
                                         const std::vector<int>& ctrl) {
  std::vector<double> s(ctrl.size(), 0.0);
  for (size_t a = 0; a < ctrl.size(); ++a)
    for (size_t b = 0; b < ctrl.size(); ++b)
      if (a != b)
        s[a] += squared_distance(inst.position(ctrl[a]), inst.position(ctrl[b]));
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

ObjectiveBreakdown evaluate_ll(const NetworkInstance& inst, const Placement& pl) {
  check_controllers(inst, pl);
  const auto& ctrl = pl.controllers;
  std::vector<int> counts(ctrl.size(), 0);
  double delay = 0.0;
  for (int i = 0; i < inst.size(); ++i) {
    const int slot = controller_slot(ctrl, pl.assignment[static_cast<size_t>(i)]);
    counts[static_cast<size_t>(slot)] += 1;
    delay += squared_distance(inst.position(i), inst.position(ctrl[static_cast<size_t>(slot)]));
  }
  const std::vector<double> s = controller_sync_sums(inst, ctrl);
  double sync = 0.0;
  for (size_t j = 0; j < ctrl.size(); ++j) sync += counts[j] * s[j];
  ObjectiveBreakdown out;
  out.delay_cost = delay;
  out.sync_cost = sync;
  out.total = delay + inst.gamma * sync;
  return out;
}

ObjectiveBreakdown evaluate_lb(const NetworkInstance& inst, const Placement& pl) {
  check_controllers(inst, pl);
  if (!pl.leader) throw ValidationError("leader-based objective requires a leader");
  const auto& ctrl = pl.controllers;
  controller_slot(ctrl, *pl.leader);  // membership check
  double delay = 0.0;
  for (int i = 0; i < inst.size(); ++i) {
    const int slot = controller_slot(ctrl, pl.assignment[static_cast<size_t>(i)]);
    delay += squared_distance(inst.position(i), inst.position(ctrl[static_cast<size_t>(slot)]));
  }
  double star = 0.0;
  for (int c : ctrl) star += squared_distance(inst.position(c), inst.position(*pl.leader));
  ObjectiveBreakdown out;
  out.delay_cost = delay;
  out.sync_cost = static_cast<double>(inst.size()) * star;
  out.total = out.delay_cost + inst.gamma * out.sync_cost;
  return out;
}

NetworkInstance generate_gaussian_instance(const GeneratorParams& p, GenerationInfo* info) {
  if (p.clusters < 1) throw ValidationError("generator: clusters must be >= 1");
  if (p.size < p.clusters) throw ValidationError("generator: size must be >= clusters");
  if (p.dimension < 1) throw ValidationError("generator: dimension must be >= 1");
  if (p.cluster_spread < 0.0) throw ValidationError("generator: cluster_spread must be >= 0");
  if (!(p.center_box_high >= p.center_box_low))
    throw ValidationError("generator: center box is empty");
  if (p.gamma < 0.0) throw ValidationError("generator: gamma must be >= 0");

  Rng rng(p.seed);
  std::vector<std::vector<double>> centers(static_cast<size_t>(p.clusters));
  for (auto& c : centers) {
    c.resize(static_cast<size_t>(p.dimension));
    for (auto& x : c) x = rng.uniform(p.center_box_low, p.center_box_high);
  }

  NetworkInstance inst;
  inst.dimension = p.dimension;
  inst.gamma = p.gamma;
  inst.nodes.resize(static_cast<size_t>(p.size));
  const double w = 1.0 / static_cast<double>(p.size);
  std::vector<int> labels(static_cast<size_t>(p.size));
  for (int i = 0; i < p.size; ++i) {
    const int k = i % p.clusters;
    labels[static_cast<size_t>(i)] = k;
    auto& node = inst.nodes[static_cast<size_t>(i)];
    node.weight = w;
    node.position = centers[static_cast<size_t>(k)];
    for (auto& x : node.position) x += p.cluster_spread * rng.normal();
  }
  inst.candidates.resize(static_cast<size_t>(p.size));
  for (int i = 0; i < p.size; ++i) inst.candidates[static_cast<size_t>(i)] = i;
  inst.validate();
  if (info) {
    info->centers = std::move(centers);
    info->labels = std::move(labels);
  }
  return inst;
}

NetworkInstance load_instance(const std::string& path) {
  const json j = read_json_file(path);
  NetworkInstance inst;
  try {
    inst.dimension = j.at("dimension").get<int>();
    inst.gamma = j.at("gamma").get<double>();
    const auto& nodes = j.at("nodes");
    if (!nodes.is_array()) throw IoError(path + ": nodes must be an array");
    inst.nodes.resize(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
      inst.nodes[i].position = nodes[i].get<std::vector<double>>();
    if (j.contains("weights")) {
      const auto weights = j.at("weights").get<std::vector<double>>();
      if (weights.size() != inst.nodes.size())
        throw ValidationError(path + ": weights length differs from node count");
      for (size_t i = 0; i < weights.size(); ++i) inst.nodes[i].weight = weights[i];
    } else {
      const double w = inst.nodes.empty() ? 0.0 : 1.0 / static_cast<double>(inst.nodes.size());
      for (auto& n : inst.nodes) n.weight = w;
    }
    inst.candidates = j.at("candidates").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw IoError("cannot read " + path + ": " + e.what());
  }
  std::sort(inst.candidates.begin(), inst.candidates.end());
  inst.validate();
  return inst;
}

void save_instance(const NetworkInstance& inst, const std::string& path) {
  inst.validate();
  json j;
  j["dimension"] = inst.dimension;
  j["gamma"] = inst.gamma;
  json nodes = json::array();
  json weights = json::array();
  for (const auto& n : inst.nodes) {
    nodes.push_back(n.position);
    weights.push_back(n.weight);
  }
  j["nodes"] = std::move(nodes);
  j["weights"] = std::move(weights);
  j["candidates"] = inst.candidates;
  write_json_file(j, path);
}

Placement load_placement(const std::string& path) {
  const json j = read_json_file(path);
  Placement pl;
  try {
    pl.controllers = j.at("controllers").get<std::vector<int>>();
    pl.assignment = j.at("assignment").get<std::vector<int>>();
    const auto& leader = j.at("leader");
    if (!leader.is_null()) pl.leader = leader.get<int>();
    const auto& obj = j.at("objective");
    pl.objective.delay_cost = obj.at("delay_cost").get<double>();
    pl.objective.sync_cost = obj.at("sync_cost").get<double>();
    pl.objective.total = obj.at("total").get<double>();
  } catch (const json::exception& e) {
    throw IoError("cannot read " + path + ": " + e.what());
  }
  if (pl.controllers.empty()) throw ValidationError(path + ": placement has no controllers");
  if (!std::is_sorted(pl.controllers.begin(), pl.controllers.end()))
    throw ValidationError(path + ": controllers must be sorted");
  for (int c : pl.assignment)
    if (!std::binary_search(pl.controllers.begin(), pl.controllers.end(), c))
      throw ValidationError(path + ": assignment to a non-controller node");
  if (pl.leader &&
      !std::binary_search(pl.controllers.begin(), pl.controllers.end(), *pl.leader))
    throw ValidationError(path + ": leader is not a controller");
  return pl;
}

Placement load_placement(const std::string& path, const NetworkInstance& instance) {
  Placement pl = load_placement(path);
  validate_placement(instance, pl);
  return pl;
}

void save_placement(const Placement& pl, const std::string& path) {
  json j;
  j["controllers"] = pl.controllers;
  j["assignment"] = pl.assignment;
  if (pl.leader)
    j["leader"] = *pl.leader;
  else
    j["leader"] = nullptr;
  j["objective"] = {{"delay_cost", pl.objective.delay_cost},
                    {"sync_cost", pl.objective.sync_cost},
                    {"total", pl.objective.total}};
  write_json_file(j, path);
}

}  // namespace ecp
