#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "dcool/problem.hpp"

namespace dcool {

// JSON wire format for problems:
//   {
//     "p": 2,
//     "sensors": [1, 2, ..., n],
//     "anchors": [[x, y], ...],
//     "edges": [[i, j, d], ...],
//     "anchor_links": [[i, k, r], ...]
//   }
// Unknown fields are rejected rather than ignored so that typos in hand
// written files fail loudly. Duplicate directed readings for the same pair
// are merged by arithmetic mean.

inline NetworkProblem problem_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& msg) { throw ProblemFormatError("problem JSON: " + msg); };
  if (!j.is_object()) fail("top level must be an object");
  static const char* allowed[] = {"p", "sensors", "anchors", "edges", "anchor_links"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || (it.key() == a);
    if (!known) fail("unknown field \"" + it.key() + "\"");
  }
  for (const char* a : allowed) {
    if (!j.contains(a)) fail(std::string("missing field \"") + a + "\"");
  }

  if (!j["p"].is_number_integer()) fail("\"p\" must be an integer");
  const int p = j["p"].get<int>();

  if (!j["sensors"].is_array()) fail("\"sensors\" must be an array");
  const int n = static_cast<int>(j["sensors"].size());
  for (int i = 0; i < n; ++i) {
    if (!j["sensors"][i].is_number_integer() || j["sensors"][i].get<int>() != i + 1)
      fail("\"sensors\" must be the dense id list [1.." + std::to_string(n) + "]");
  }

  ProblemBuilder builder(p, n);

  for (const auto& a : j["anchors"]) {
    if (!a.is_array() || static_cast<int>(a.size()) != p)
      fail("each anchor must be an array of " + std::to_string(p) + " coordinates");
    Vec pos(p);
    for (int c = 0; c < p; ++c) {
      if (!a[c].is_number()) fail("anchor coordinates must be numbers");
      pos[c] = a[c].get<double>();
    }
    builder.add_anchor(pos);
  }

  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number())
      fail("each edge must be [i, j, d] with integer ids");
    builder.add_range_measurement(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
  }

  for (const auto& l : j["anchor_links"]) {
    if (!l.is_array() || l.size() != 3 || !l[0].is_number_integer() ||
        !l[1].is_number_integer() || !l[2].is_number())
      fail("each anchor link must be [i, k, r] with integer ids");
    builder.add_anchor_measurement(l[0].get<int>(), l[1].get<int>(), l[2].get<double>());
  }

  return builder.build();
}

inline nlohmann::ordered_json problem_to_json(const NetworkProblem& pb) {
  nlohmann::ordered_json j;
  j["p"] = pb.p;
  std::vector<int> ids(pb.n_sensors);
  for (int i = 0; i < pb.n_sensors; ++i) ids[i] = i + 1;
  j["sensors"] = ids;
  j["anchors"] = nlohmann::ordered_json::array();
  for (const Vec& a : pb.anchors) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < a.size(); ++c) row.push_back(a[c]);
    j["anchors"].push_back(row);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : pb.edges) j["edges"].push_back({e.i, e.j, e.d});
  j["anchor_links"] = nlohmann::ordered_json::array();
  for (const AnchorLink& l : pb.anchor_links) j["anchor_links"].push_back({l.sensor, l.anchor, l.r});
  return j;
}

inline NetworkProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFormatError("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ProblemFormatError("cannot parse " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

inline void save_problem(const NetworkProblem& pb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write problem file: " + path);
  out << problem_to_json(pb).dump(2) << "\n";
}

}  // namespace dcool
