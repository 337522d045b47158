#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dcool/errors.hpp"
#include "dcool/vec.hpp"

namespace dcool {

// Range measurement between sensors i and j (stored once with i < j).
struct Edge {
  int i = 0;
  int j = 0;
  double d = 0.0;
};

// Range measurement between sensor i and anchor k.
struct AnchorLink {
  int sensor = 0;
  int anchor = 0;
  double r = 0.0;
};

// Static description of a localization instance. Sensor ids are dense
// 1..n_sensors, anchor ids dense 1..anchors.size(). Edges are held sorted by
// (i, j) with i < j, anchor links sorted by (sensor, anchor).
struct NetworkProblem {
  int p = 2;
  int n_sensors = 0;
  std::vector<Vec> anchors;
  std::vector<Edge> edges;
  std::vector<AnchorLink> anchor_links;

  int n_anchors() const { return static_cast<int>(anchors.size()); }

  // Symmetric measurement lookup; nullopt when i,j are not linked.
  std::optional<double> edge_measurement(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j),
                               [](const Edge& e, const std::pair<int, int>& key) {
                                 return std::make_pair(e.i, e.j) < key;
                               });
    if (it != edges.end() && it->i == i && it->j == j) return it->d;
    return std::nullopt;
  }
};

// Solver parameters shared across the stack. Field names follow the roles in
// the inner/outer loops: outer_iters is the number of surrogate refreshes,
// inner_iters the number of synchronous rounds per refresh.
struct AlgorithmConfig {
  double rho = 50.0;
  int outer_iters = 40;
  int inner_iters = 100;
  double nesterov_tol = 1e-9;
  int nesterov_max_iters = 500;
  double bisection_tol = 1e-10;
  double degeneracy_eps = 1e-12;
  // Optional early exit of the inner rounds once the consensus residual
  // drops below residual_exit_tol. Off by default: the message ledger is
  // only exactly predictable with a fixed round count.
  bool residual_early_exit = false;
  double residual_exit_tol = 1e-8;
  int workers = 1;
};

inline void check_config(const AlgorithmConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid config: " + msg); };
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho)) fail("rho must be positive and finite");
  if (cfg.outer_iters < 0) fail("outer_iters must be >= 0");
  if (cfg.inner_iters < 0) fail("inner_iters must be >= 0");
  if (!(cfg.nesterov_tol > 0.0)) fail("nesterov_tol must be positive");
  if (cfg.nesterov_max_iters < 0) fail("nesterov_max_iters must be >= 0");
  if (!(cfg.bisection_tol > 0.0)) fail("bisection_tol must be positive");
  if (!(cfg.degeneracy_eps >= 0.0)) fail("degeneracy_eps must be >= 0");
  if (cfg.workers < 1) fail("workers must be >= 1");
}

// ---- validation ----

struct ValidationIssue {
  enum class Kind {
    MalformedEdge,
    NegativeMeasurement,
    NonFiniteMeasurement,
    DanglingAnchorRef,
    DisconnectedGraph,
    BadDimension,
  };
  Kind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const {
    std::ostringstream os;
    if (ok()) {
      os << "valid";
      return os.str();
    }
    os << issues.size() << " issue(s):";
    for (const auto& is : issues) os << "\n  - " << is.detail;
    return os.str();
  }
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error("problem validation failed: " + report.to_string()),
        report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};
}  // namespace detail

// Collects every violation instead of stopping at the first one.
inline ValidationReport check_problem(const NetworkProblem& pb) {
  using Kind = ValidationIssue::Kind;
  ValidationReport rep;
  auto add = [&rep](Kind k, const std::string& d) { rep.issues.push_back({k, d}); };

  if (pb.p != 2 && pb.p != 3)
    add(Kind::BadDimension, "ambient dimension p must be 2 or 3, got " + std::to_string(pb.p));
  if (pb.n_sensors < 1)
    add(Kind::MalformedEdge, "network must contain at least one sensor");

  for (std::size_t k = 0; k < pb.anchors.size(); ++k) {
    const Vec& a = pb.anchors[k];
    if (a.size() != pb.p)
      add(Kind::BadDimension, "anchor " + std::to_string(k + 1) + " has dimension " +
                                  std::to_string(a.size()) + ", expected " + std::to_string(pb.p));
    else if (!all_finite(a))
      add(Kind::NonFiniteMeasurement, "anchor " + std::to_string(k + 1) + " position is not finite");
  }

  detail::DisjointSet dsu(std::max(pb.n_sensors, 1));
  for (const Edge& e : pb.edges) {
    const std::string tag = "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")";
    if (e.i < 1 || e.i > pb.n_sensors || e.j < 1 || e.j > pb.n_sensors || e.i == e.j) {
      add(Kind::MalformedEdge, tag + " has endpoints outside 1.." + std::to_string(pb.n_sensors));
      continue;
    }
    if (!std::isfinite(e.d))
      add(Kind::NonFiniteMeasurement, tag + " has non-finite measurement");
    else if (e.d < 0.0)
      add(Kind::NegativeMeasurement, tag + " has negative measurement " + std::to_string(e.d));
    dsu.unite(e.i - 1, e.j - 1);
  }

  for (const AnchorLink& al : pb.anchor_links) {
    const std::string tag =
        "anchor link (" + std::to_string(al.sensor) + "," + std::to_string(al.anchor) + ")";
    if (al.sensor < 1 || al.sensor > pb.n_sensors) {
      add(Kind::DanglingAnchorRef, tag + " references unknown sensor");
      continue;
    }
    if (al.anchor < 1 || al.anchor > pb.n_anchors()) {
      add(Kind::DanglingAnchorRef, tag + " references unknown anchor");
      continue;
    }
    if (!std::isfinite(al.r))
      add(Kind::NonFiniteMeasurement, tag + " has non-finite measurement");
    else if (al.r < 0.0)
      add(Kind::NegativeMeasurement, tag + " has negative measurement " + std::to_string(al.r));
  }

  if (pb.n_sensors >= 2) {
    std::map<int, std::vector<int>> comps;
    for (int i = 0; i < pb.n_sensors; ++i) comps[dsu.find(i)].push_back(i + 1);
    if (comps.size() > 1) {
      std::ostringstream os;
      os << "sensor graph is disconnected, " << comps.size() << " components:";
      int shown = 0;
      for (const auto& [root, members] : comps) {
        os << " {";
        for (std::size_t t = 0; t < members.size() && t < 8; ++t)
          os << (t ? "," : "") << members[t];
        if (members.size() > 8) os << ",...";
        os << "}";
        if (++shown == 6 && comps.size() > 6) {
          os << " ...";
          break;
        }
      }
      add(Kind::DisconnectedGraph, os.str());
    }
  }
  return rep;
}

// Throws ValidationError listing every violation; returns the problem
// unchanged so calls can be chained.
inline const NetworkProblem& validate_problem(const NetworkProblem& pb) {
  ValidationReport rep = check_problem(pb);
  if (!rep.ok()) throw ValidationError(std::move(rep));
  return pb;
}

// ---- construction ----

// Accumulates possibly asymmetric directed range readings; build() keeps one
// measurement per pair, the mean of the readings in both directions.
class ProblemBuilder {
 public:
  ProblemBuilder(int p, int n_sensors) {
    pb_.p = p;
    pb_.n_sensors = n_sensors;
  }

  // Returns the 1-based anchor id.
  int add_anchor(const Vec& position) {
    pb_.anchors.push_back(position);
    return pb_.n_anchors();
  }

  void add_range_measurement(int from, int to, double d) {
    auto key = std::minmax(from, to);
    auto& acc = edge_acc_[{key.first, key.second}];
    acc.first += d;
    acc.second += 1;
  }

  void add_anchor_measurement(int sensor, int anchor, double r) {
    auto& acc = link_acc_[{sensor, anchor}];
    acc.first += r;
    acc.second += 1;
  }

  NetworkProblem build() const {
    NetworkProblem pb = pb_;
    for (const auto& [key, acc] : edge_acc_)
      pb.edges.push_back({key.first, key.second, acc.first / acc.second});
    for (const auto& [key, acc] : link_acc_)
      pb.anchor_links.push_back({key.first, key.second, acc.first / acc.second});
    return pb;  // std::map iteration already yields sorted order
  }

 private:
  NetworkProblem pb_;
  std::map<std::pair<int, int>, std::pair<double, int>> edge_acc_;
  std::map<std::pair<int, int>, std::pair<double, int>> link_acc_;
};

// ---- adjacency ----

// Sorted adjacency lists derived from the edge set, 1-indexed by sensor id.
struct NeighborSets {
  std::vector<std::vector<int>> open;    // V_i, ascending
  std::vector<std::vector<int>> closed;  // V_i plus i itself, ascending

  const std::vector<int>& open_of(int i) const { return open[i]; }
  const std::vector<int>& closed_of(int i) const { return closed[i]; }
};

inline NeighborSets neighbor_sets(const NetworkProblem& pb) {
  NeighborSets ns;
  ns.open.assign(pb.n_sensors + 1, {});
  ns.closed.assign(pb.n_sensors + 1, {});
  for (const Edge& e : pb.edges) {
    ns.open[e.i].push_back(e.j);
    ns.open[e.j].push_back(e.i);
  }
  for (int i = 1; i <= pb.n_sensors; ++i) {
    std::sort(ns.open[i].begin(), ns.open[i].end());
    ns.closed[i] = ns.open[i];
    ns.closed[i].insert(std::lower_bound(ns.closed[i].begin(), ns.closed[i].end(), i), i);
  }
  return ns;
}

}  // namespace dcool
