// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtraj/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "qtraj/error.hpp"

namespace qtraj {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Primal network simplex for the uncapacitated bipartite transportation
// problem. Nodes 0..ns-1 are sources, ns..ns+nt-1 sinks, and the last node is
// an artificial root joined to every node by a big-M arc. Arcs are implicit:
// a tree arc is stored at its child node (direction and flow), and every
// non-tree arc has zero flow because arcs carry no upper bound.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                   const std::vector<double>& cost)
      : ns_(static_cast<int>(supply.size())),
        nt_(static_cast<int>(demand.size())),
        nodes_(ns_ + nt_ + 1),
        root_(ns_ + nt_),
        cost_(cost),
        parent_(nodes_, -1),
        up_(nodes_, 0),
        flow_(nodes_, 0.0),
        depth_(nodes_, 0),
        potential_(nodes_, 0.0),
        children_(nodes_) {
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, c);
    big_m_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    eps_ = 1e-12 * std::max(1.0, max_cost);
    for (int u = 0; u < root_; ++u) {
      parent_[u] = root_;
      depth_[u] = 1;
      children_[root_].push_back(u);
      if (u < ns_) {
        up_[u] = 1;  // u -> root
        flow_[u] = supply[u];
        potential_[u] = -big_m_;
      } else {
        up_[u] = 0;  // root -> u
        flow_[u] = demand[u - ns_];
        potential_[u] = big_m_;
      }
    }
  }

  TransportResult run() {
    const long long arcs = static_cast<long long>(ns_) * nt_;
    const long long block =
        std::max<long long>(10, static_cast<long long>(std::sqrt(static_cast<double>(arcs))));
    long long next = 0;
    TransportResult result;
    const long long max_pivots = 50 * arcs + 1000;
    while (true) {
      // Block search: scan blocks of arcs cyclically, entering the most
      // negative reduced cost found in the first block that has one.
      int best_s = -1;
      int best_t = -1;
      double best = -eps_;
      long long scanned = 0;
      long long in_block = 0;
      while (scanned < arcs) {
        const int s = static_cast<int>(next / nt_);
        const int t = static_cast<int>(next % nt_);
        const double rc = arc_cost(s, t) + potential_[s] - potential_[ns_ + t];
        if (rc < best) {
          best = rc;
          best_s = s;
          best_t = t;
        }
        ++scanned;
        ++in_block;
        if (++next == arcs) next = 0;
        if (in_block == block) {
          if (best_s >= 0) break;
          in_block = 0;
        }
      }
      if (best_s < 0) break;
      pivot(best_s, ns_ + best_t);
      if (++result.pivots > max_pivots) {
        throw Error(ErrorKind::kNumericalFailure, "network simplex exceeded its pivot limit");
      }
    }

    double artificial = 0.0;
    for (int u = 0; u < root_; ++u) {
      const int p = parent_[u];
      if (p == root_) {
        artificial += flow_[u];
        continue;
      }
      const int s = up_[u] ? u : p;
      const int t = up_[u] ? p : u;
      if (flow_[u] > 0.0) {
        result.total_cost += flow_[u] * arc_cost(s, t - ns_);
        result.plan.push_back({s, t - ns_, flow_[u]});
      }
    }
    if (artificial > 1e-9) {
      throw Error(ErrorKind::kNumericalFailure,
                  "transport problem left mass on artificial arcs (unbalanced input?)");
    }
    return result;
  }

 private:
  double arc_cost(int s, int t) const {
    return cost_[static_cast<std::size_t>(s) * static_cast<std::size_t>(nt_) + t];
  }

  // Cost of the tree arc stored at child u.
  double tree_arc_cost(int u) const {
    const int p = parent_[u];
    if (p == root_) return big_m_;
    return up_[u] ? arc_cost(u, p - ns_) : arc_cost(p, u - ns_);
  }

  void pivot(int in_source, int in_sink) {
    // Join node of the cycle closed by the entering arc.
    int a = in_source;
    int b = in_sink;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const int join = a;

    // Leaving arc with the strongly feasible tie rule: on the source side the
    // first blocking arc from the entering arc wins, on the sink side the last.
    double delta = kInfinity;
    int leaving = -1;
    int side = 0;
    for (int u = in_source; u != join; u = parent_[u]) {
      if (up_[u] && flow_[u] < delta) {
        delta = flow_[u];
        leaving = u;
        side = 1;
      }
    }
    for (int u = in_sink; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[u] <= delta) {
        delta = flow_[u];
        leaving = u;
        side = 2;
      }
    }
    if (leaving < 0) {
      throw Error(ErrorKind::kNumericalFailure, "network simplex found an unbounded cycle");
    }

    if (delta > 0.0) {
      for (int u = in_source; u != join; u = parent_[u]) flow_[u] += up_[u] ? -delta : delta;
      for (int u = in_sink; u != join; u = parent_[u]) flow_[u] += up_[u] ? delta : -delta;
    }

    // Re-hang the subtree cut off by the leaving arc from the entering arc,
    // reversing the parent chain between the entering endpoint and `leaving`.
    const int inner = side == 1 ? in_source : in_sink;
    const int outer = side == 1 ? in_sink : in_source;
    detach(leaving);
    int child = inner;
    int new_parent = outer;
    int child_up = side == 1 ? 1 : 0;
    double child_flow = delta;
    while (true) {
      const int old_parent = parent_[child];
      const int old_up = up_[child];
      const double old_flow = flow_[child];
      const bool last = child == leaving;
      if (!last) detach(child);
      parent_[child] = new_parent;
      up_[child] = child_up;
      flow_[child] = child_flow;
      children_[new_parent].push_back(child);
      if (last) break;
      new_parent = child;
      child = old_parent;
      child_up = old_up ? 0 : 1;
      child_flow = old_flow;
    }
    refresh_subtree(inner);
  }

  void detach(int u) {
    auto& siblings = children_[parent_[u]];
    const auto it = std::find(siblings.begin(), siblings.end(), u);
    *it = siblings.back();
    siblings.pop_back();
  }

  // Recomputes depth and potentials below (and including) u from its parent.
  void refresh_subtree(int u) {
    stack_.clear();
    stack_.push_back(u);
    while (!stack_.empty()) {
      const int x = stack_.back();
      stack_.pop_back();
      const int p = parent_[x];
      depth_[x] = depth_[p] + 1;
      const double c = tree_arc_cost(x);
      // Tree arcs have zero reduced cost c + pi(tail) - pi(head).
      potential_[x] = up_[x] ? potential_[p] - c : potential_[p] + c;
      for (int y : children_[x]) stack_.push_back(y);
    }
  }

  int ns_;
  int nt_;
  int nodes_;
  int root_;
  const std::vector<double>& cost_;
  double big_m_ = 0.0;
  double eps_ = 0.0;
  std::vector<int> parent_;
  std::vector<char> up_;
  std::vector<double> flow_;
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<std::vector<int>> children_;
  std::vector<int> stack_;
};

}  // namespace

TransportResult solve_transport(const std::vector<double>& supply,
                                const std::vector<double>& demand,
                                const std::vector<double>& cost) {
  if (supply.empty() || demand.empty() || cost.size() != supply.size() * demand.size()) {
    throw Error(ErrorKind::kInvalidInput, "transport: cost matrix shape does not match marginals");
  }
  double total_supply = 0.0;
  double total_demand = 0.0;
  for (double s : supply) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorKind::kInvalidInput, "transport: supplies must be finite and >= 0");
    }
    total_supply += s;
  }
  for (double d : demand) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::kInvalidInput, "transport: demands must be finite and >= 0");
    }
    total_demand += d;
  }
  for (double c : cost) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(ErrorKind::kInvalidInput, "transport: costs must be finite and >= 0");
    }
  }
  if (std::abs(total_supply - total_demand) > 1e-9 * std::max(1.0, total_supply)) {
    throw Error(ErrorKind::kInvalidInput, "transport: supply and demand totals differ");
  }
  // Balance exactly by absorbing rounding into the largest demand.
  std::vector<double> balanced = demand;
  const auto largest = std::max_element(balanced.begin(), balanced.end());
  *largest += total_supply - total_demand;
  return TransportSimplex(supply, balanced, cost).run();
}

}  // namespace qtraj
