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

#include "qtraj/assignment.hpp"

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <queue>
#include <limits>
#include <utility>

#include "qtraj/error.hpp"

namespace qtraj {
namespace {

constexpr double kLarge = std::numeric_limits<double>::infinity();
constexpr long long kRowReductionBudget = 2;
constexpr double kDualTolerance = 1e-12;

class JonkerVolgenant {
 public:
  JonkerVolgenant(const std::vector<double>& cost, int n)
      : c_(cost.data()), n_(n), x_(n, -1), y_(n, -1), v_(n, 0.0) {}

  AssignmentResult solve() {
    std::vector<int> free_rows(static_cast<std::size_t>(n_));
    int n_free = column_reduction(free_rows);
    for (int pass = 0; n_free > 0 && pass < 2; ++pass) {
      n_free = augmenting_row_reduction(free_rows, n_free);
    }
    if (n_free > 0) augment(free_rows, n_free);

    AssignmentResult result;
    result.row_to_col = x_;
    for (int i = 0; i < n_; ++i) {
      if (x_[i] < 0) throw Error(ErrorKind::kNumericalFailure, "assignment left a row unmatched");
      result.total_cost += at(i, x_[i]);
    }
    return result;
  }

 private:
  double at(int i, int j) const {
    return c_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + j];
  }

  // Column reduction with reduction transfer; returns the number of free rows.
  int column_reduction(std::vector<int>& free_rows) {
    for (int j = 0; j < n_; ++j) {
      v_[j] = kLarge;
      y_[j] = 0;
    }
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double c = at(i, j);
        if (c < v_[j]) {
          v_[j] = c;
          y_[j] = i;
        }
      }
    }
    std::vector<char> unique(static_cast<std::size_t>(n_), 1);
    for (int j = n_ - 1; j >= 0; --j) {
      const int i = y_[j];
      if (x_[i] < 0) {
        x_[i] = j;
      } else {
        unique[i] = 0;
        y_[j] = -1;
      }
    }
    int n_free = 0;
    for (int i = 0; i < n_; ++i) {
      if (x_[i] < 0) {
        free_rows[n_free++] = i;
      } else if (unique[i] && n_ > 1) {
        const int j = x_[i];
        double min = kLarge;
        for (int j2 = 0; j2 < n_; ++j2) {
          if (j2 == j) continue;
          const double c = at(i, j2) - v_[j2];
          if (c < min) min = c;
        }
        v_[j] -= min;
      }
    }
    return n_free;
  }

  int augmenting_row_reduction(std::vector<int>& free_rows, int n_free) {
    int current = 0;
    int new_free = 0;
    long long rr_count = 0;
    while (current < n_free) {
      ++rr_count;
      const int free_i = free_rows[current++];
      int j1 = 0;
      double v1 = at(free_i, 0) - v_[0];
      int j2 = -1;
      double v2 = kLarge;
      for (int j = 1; j < n_; ++j) {
        const double c = at(free_i, j) - v_[j];
        if (c < v2) {
          if (c >= v1) {
            v2 = c;
            j2 = j;
          } else {
            v2 = v1;
            v1 = c;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = y_[j1];
      const double v1_new = v_[j1] - (v2 - v1);
      const bool v1_lowers = v1_new < v_[j1];
      // The budget keeps near-tied continuous costs from driving many tiny
      // price decrements; past it, rows still go to a minimal column.
      if (rr_count < static_cast<long long>(current) * n_ && rr_count < kRowReductionBudget * n_) {
        if (v1_lowers) {
          v_[j1] = v1_new;
        } else if (i0 >= 0 && j2 >= 0) {
          j1 = j2;
          i0 = y_[j2];
        }
        if (i0 >= 0) {
          if (v1_lowers) {
            free_rows[--current] = i0;
          } else {
            free_rows[new_free++] = i0;
          }
        }
      } else if (i0 >= 0) {
        free_rows[new_free++] = i0;
      }
      x_[free_i] = j1;
      y_[j1] = free_i;
    }
    return new_free;
  }

  // Moves every column with minimal d among cols[lo..n) to the front block
  // cols[lo..hi) and returns hi.
  int find_minimum(int lo, const std::vector<double>& d, std::vector<int>& cols) const {
    int hi = lo + 1;
    double mind = d[cols[lo]];
    for (int k = hi; k < n_; ++k) {
      const int j = cols[k];
      if (d[j] <= mind) {
        if (d[j] < mind) {
          hi = lo;
          mind = d[j];
        }
        cols[k] = cols[hi];
        cols[hi++] = j;
      }
    }
    return hi;
  }

  int scan(int& lo, int& hi, std::vector<double>& d, std::vector<int>& cols,
           std::vector<int>& pred) const {
    while (lo != hi) {
      int j = cols[lo++];
      const int i = y_[j];
      const double mind = d[j];
      const double h = at(i, j) - v_[j] - mind;
      for (int k = hi; k < n_; ++k) {
        j = cols[k];
        const double reduced = at(i, j) - v_[j] - h;
        if (reduced < d[j]) {
          d[j] = reduced;
          pred[j] = i;
          if (reduced == mind) {
            if (y_[j] < 0) return j;
            cols[k] = cols[hi];
            cols[hi++] = j;
          }
        }
      }
    }
    return -1;
  }

  // Dijkstra-style shortest augmenting path from `start`; returns the free
  // column reached and updates the column duals of settled columns.
  int find_path(int start, std::vector<int>& pred, std::vector<double>& d,
                std::vector<int>& cols) {
    int lo = 0;
    int hi = 0;
    int n_ready = 0;
    for (int j = 0; j < n_; ++j) {
      cols[j] = j;
      pred[j] = start;
      d[j] = at(start, j) - v_[j];
    }
    int final_j = -1;
    double mind = 0.0;
    while (final_j == -1) {
      if (lo == hi) {
        n_ready = lo;
        hi = find_minimum(lo, d, cols);
        // Kept here: after an early return from scan, cols[lo] may already
        // lie outside the minimal block.
        mind = d[cols[lo]];
        for (int k = lo; k < hi; ++k) {
          if (y_[cols[k]] < 0) {
            final_j = cols[k];
            break;
          }
        }
      }
      if (final_j == -1) final_j = scan(lo, hi, d, cols, pred);
    }
    for (int k = 0; k < n_ready; ++k) {
      const int j = cols[k];
      v_[j] += d[j] - mind;
    }
    return final_j;
  }

  void augment(const std::vector<int>& free_rows, int n_free) {
    std::vector<int> pred(static_cast<std::size_t>(n_));
    std::vector<double> d(static_cast<std::size_t>(n_));
    std::vector<int> cols(static_cast<std::size_t>(n_));
    for (int f = 0; f < n_free; ++f) {
      const int free_i = free_rows[f];
      int j = find_path(free_i, pred, d, cols);
      int i = -1;
      while (i != free_i) {
        i = pred[j];
        y_[j] = i;
        std::swap(j, x_[i]);
      }
    }
  }

  const double* c_;
  int n_;
  std::vector<int> x_;  // row -> column
  std::vector<int> y_;  // column -> row
  std::vector<double> v_;
};

// Successive shortest augmenting paths on a sparse candidate graph with row
// and column potentials; reduced costs c - u_i - v_j stay non-negative on
// every stored edge and vanish on matched ones.
class SparseAssignment {
 public:
  SparseAssignment(int n, const CostFunction& cost, int candidates)
      : n_(n),
        cost_(cost),
        adj_(static_cast<std::size_t>(n)),
        dense_(static_cast<std::size_t>(n), 0),
        x_(static_cast<std::size_t>(n), -1),
        y_(static_cast<std::size_t>(n), -1),
        u_(static_cast<std::size_t>(n), 0.0),
        v_(static_cast<std::size_t>(n), 0.0),
        d_(static_cast<std::size_t>(n), kLarge),
        row_dist_(static_cast<std::size_t>(n), kLarge),
        pred_(static_cast<std::size_t>(n), -1),
        settled_(static_cast<std::size_t>(n), 0) {
    const int k = std::min(candidates, n);
    std::vector<std::pair<double, int>> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) row[static_cast<std::size_t>(j)] = {cost_(i, j), j};
      std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
      auto& edges = adj_[static_cast<std::size_t>(i)];
      edges.reserve(static_cast<std::size_t>(k));
      for (int r = 0; r < k; ++r) {
        edges.push_back({row[static_cast<std::size_t>(r)].second,
                         row[static_cast<std::size_t>(r)].first});
      }
    }
  }

  AssignmentResult solve() {
    std::vector<int> free_rows;
    for (int i = 0; i < n_; ++i) {
      const auto& edges = adj_[static_cast<std::size_t>(i)];
      auto best = std::min_element(edges.begin(), edges.end(),
                                   [](const Edge& a, const Edge& b) { return a.cost < b.cost; });
      u_[static_cast<std::size_t>(i)] = best->cost;
      if (y_[static_cast<std::size_t>(best->col)] < 0) {
        x_[static_cast<std::size_t>(i)] = best->col;
        y_[static_cast<std::size_t>(best->col)] = i;
      } else {
        free_rows.push_back(i);
      }
    }
    while (true) {
      for (int i : free_rows) augment_from(i);
      free_rows = repair_dual_violations();
      if (free_rows.empty()) break;
    }
    AssignmentResult result;
    result.row_to_col = x_;
    for (int i = 0; i < n_; ++i) result.total_cost += cost_(i, x_[static_cast<std::size_t>(i)]);
    return result;
  }

 private:
  struct Edge {
    int col;
    double cost;
  };

  double reduced(int i, const Edge& e) const {
    return std::max(0.0, e.cost - u_[static_cast<std::size_t>(i)] -
                             v_[static_cast<std::size_t>(e.col)]);
  }

  void make_dense(int i) {
    auto& edges = adj_[static_cast<std::size_t>(i)];
    edges.clear();
    for (int j = 0; j < n_; ++j) edges.push_back({j, cost_(i, j)});
    dense_[static_cast<std::size_t>(i)] = 1;
  }

  // Dijkstra from free row `root`; when its candidate graph reaches no free
  // column, the root gets every column and the search restarts.
  void augment_from(int root) {
    using Item = std::pair<double, int>;
    while (true) {
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      std::vector<int> touched_cols;
      std::vector<int> reached_rows{root};
      std::vector<int> settled_cols;
      row_dist_[static_cast<std::size_t>(root)] = 0.0;
      auto relax = [&](int i, double base) {
        for (const Edge& e : adj_[static_cast<std::size_t>(i)]) {
          const auto j = static_cast<std::size_t>(e.col);
          if (settled_[j]) continue;
          const double nd = base + reduced(i, e);
          if (nd < d_[j]) {
            if (d_[j] == kLarge) touched_cols.push_back(e.col);
            d_[j] = nd;
            pred_[j] = i;
            heap.push({nd, e.col});
          }
        }
      };
      relax(root, 0.0);
      int final_col = -1;
      double total = 0.0;
      while (!heap.empty()) {
        const auto [dist, j] = heap.top();
        heap.pop();
        const auto js = static_cast<std::size_t>(j);
        if (settled_[js] || dist > d_[js]) continue;
        if (y_[js] < 0) {
          final_col = j;
          total = dist;
          break;
        }
        settled_[js] = 1;
        settled_cols.push_back(j);
        const int i = y_[js];
        row_dist_[static_cast<std::size_t>(i)] = dist;
        reached_rows.push_back(i);
        relax(i, dist);
      }
      if (final_col >= 0) {
        for (int j : settled_cols) {
          v_[static_cast<std::size_t>(j)] -= total - d_[static_cast<std::size_t>(j)];
        }
        for (int i : reached_rows) {
          u_[static_cast<std::size_t>(i)] += total - row_dist_[static_cast<std::size_t>(i)];
        }
        int j = final_col;
        while (true) {
          const int i = pred_[static_cast<std::size_t>(j)];
          y_[static_cast<std::size_t>(j)] = i;
          std::swap(j, x_[static_cast<std::size_t>(i)]);
          if (i == root) break;
        }
      }
      for (int j : touched_cols) {
        d_[static_cast<std::size_t>(j)] = kLarge;
        settled_[static_cast<std::size_t>(j)] = 0;
      }
      for (int i : reached_rows) row_dist_[static_cast<std::size_t>(i)] = kLarge;
      if (final_col >= 0) return;
      if (dense_[static_cast<std::size_t>(root)]) {
        throw Error(ErrorKind::kNumericalFailure, "sparse assignment found no augmenting path");
      }
      make_dense(root);
      const auto& edges = adj_[static_cast<std::size_t>(root)];
      double best = kLarge;
      for (const Edge& e : edges) best = std::min(best, e.cost - v_[static_cast<std::size_t>(e.col)]);
      u_[static_cast<std::size_t>(root)] = best;
    }
  }

  // Scans all pairs; adds violating edges, lowers column potentials to
  // restore feasibility and frees the rows matched to those columns.
  std::vector<int> repair_dual_violations() {
    std::vector<double> lowest(v_);
    std::vector<char> violated(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) {
      const auto is = static_cast<std::size_t>(i);
      if (dense_[is]) continue;
      auto& edges = adj_[is];
      const std::size_t known = edges.size();
      for (int j = 0; j < n_; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double c = cost_(i, j);
        if (c - u_[is] - v_[js] < -kDualTolerance) {
          const auto end = edges.begin() + static_cast<std::ptrdiff_t>(known);
          const bool present =
              std::any_of(edges.begin(), end, [&](const Edge& f) { return f.col == j; });
          if (!present) edges.push_back({j, c});
          lowest[js] = std::min(lowest[js], c - u_[is]);
          violated[js] = 1;
        }
      }
    }
    std::vector<int> freed;
    for (int j = 0; j < n_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (!violated[js]) continue;
      v_[js] = lowest[js];
      const int i = y_[js];
      if (i < 0) continue;
      x_[static_cast<std::size_t>(i)] = -1;
      y_[js] = -1;
      freed.push_back(i);
    }
    return freed;
  }

  int n_;
  const CostFunction& cost_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<char> dense_;
  std::vector<int> x_;
  std::vector<int> y_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> d_;
  std::vector<double> row_dist_;
  std::vector<int> pred_;
  std::vector<char> settled_;
};

}  // namespace

AssignmentResult solve_assignment(const std::vector<double>& cost, int n) {
  if (n <= 0 || cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::kInvalidInput, "assignment cost matrix must be n x n with n > 0");
  }
  for (double c : cost) {
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::kInvalidInput, "assignment costs must be finite");
    }
  }
  if (n == 1) return {{0}, cost[0]};
  return JonkerVolgenant(cost, n).solve();
}

AssignmentResult solve_assignment_sparse(int n, const CostFunction& cost, int candidates) {
  if (n <= 0) throw Error(ErrorKind::kInvalidInput, "assignment needs n > 0");
  if (candidates <= 0) throw Error(ErrorKind::kInvalidInput, "assignment needs candidates > 0");
  return SparseAssignment(n, cost, candidates).solve();
}

}  // namespace qtraj
