#include "revpref/indices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "revpref/garp.hpp"
#include "revpref/io.hpp"

namespace revpref {

namespace {

bool passes_at(const ChoiceDataset& ds, double e, double tol) {
  return garp_passes(transitive_closure(direct_relations(ds, e, tol)));
}

// Kosaraju strongly connected components over the active vertices of a
// digraph given by an edge predicate.
template <typename EdgeFn>
std::vector<int> scc_ids(int n, const std::vector<char>& active, EdgeFn edge) {
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, int>> stack;
  for (int s = 0; s < n; ++s) {
    if (!active[s] || seen[s]) continue;
    seen[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      const int v = stack.back().first;
      int& next = stack.back().second;
      bool descended = false;
      while (next < n) {
        const int u = next++;
        if (u != v && active[u] && !seen[u] && edge(v, u)) {
          seen[u] = 1;
          stack.emplace_back(u, 0);
          descended = true;
          break;
        }
      }
      if (!descended) {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> comp(n, -1);
  int c = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != -1) continue;
    std::vector<int> work{*it};
    comp[*it] = c;
    while (!work.empty()) {
      const int v = work.back();
      work.pop_back();
      for (int u = 0; u < n; ++u) {
        if (u != v && active[u] && comp[u] == -1 && edge(u, v)) {
          comp[u] = c;
          work.push_back(u);
        }
      }
    }
    ++c;
  }
  return comp;
}

}  // namespace

double ccei(const ChoiceDataset& ds, double tol) {
  if (ds.rounds() <= 1) return 1.0;
  if (passes_at(ds, 1.0, tol)) return 1.0;

  const std::size_t n = ds.rounds();
  const std::vector<double> cross = cross_cost_matrix(ds);
  std::vector<double> cand;
  cand.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r = cross[i * n + j] / cross[i * n + i];
      if (r > tol && r <= 1.0 + tol) cand.push_back(std::min(r, 1.0));
    }
  }
  cand.push_back(1.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [tol](double a, double b) { return std::fabs(a - b) <= tol; }),
             cand.end());

  // Pass/fail is monotone in e and constant between candidates; at the
  // smallest candidate nothing is strict, so it always passes.
  int lo = 0;
  int hi = static_cast<int>(cand.size()) - 1;
  if (!passes_at(ds, cand[0], tol)) {
    lo = -1;
    hi = 0;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (passes_at(ds, cand[mid], tol)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c_pass = lo >= 0 ? cand[lo] : 0.0;
  const double c_fail = cand[hi];
  // Failure can start just above c_pass (edges turning strict there) or
  // exactly at c_fail (new weak edges activating). The first case returns
  // the candidate itself; the second returns the largest level that still
  // passes, which sits a tolerance-width below c_fail, so a dataset failing
  // at e = 1 never reports a CCEI of exactly 1.
  const double between = 0.5 * (c_pass + c_fail);
  if (!passes_at(ds, between, tol)) return c_pass;
  double plo = between;
  double phi = c_fail;
  while (phi - plo > 0.0) {
    const double mid = 0.5 * (plo + phi);
    if (mid <= plo || mid >= phi) break;
    if (passes_at(ds, mid, tol)) {
      plo = mid;
    } else {
      phi = mid;
    }
  }
  return plo;
}

namespace {

// Branch and bound for the largest GARP-consistent subset. Branches on the
// vertices of one violating cycle at a time; vertices committed to earlier
// siblings stay in, which partitions the search space.
class HmiSearch {
 public:
  HmiSearch(RelationMatrix rel, std::uint64_t cap)
      : rel_(std::move(rel)), n_(static_cast<int>(rel_.n)), cap_(cap) {}

  int run() {
    std::vector<char> active(n_, 1);
    std::vector<char> required(n_, 0);
    best_ = greedy_consistent_size();
    search(active, n_, required);
    return best_;
  }

 private:
  // A subset is consistent iff no strict edge lies inside one strongly
  // connected component of its induced weak digraph. Returns the vertices of
  // one violating cycle, or nothing when consistent.
  std::optional<std::vector<int>> violating_cycle(const std::vector<char>& active) const {
    const auto weak = [this](int a, int b) { return rel_.weak_at(a, b); };
    const std::vector<int> comp = scc_ids(n_, active, weak);
    for (int u = 0; u < n_; ++u) {
      if (!active[u]) continue;
      for (int v = 0; v < n_; ++v) {
        if (u == v || !active[v] || !rel_.strict_at(u, v)) continue;
        if (comp[u] != comp[v]) continue;
        // weak path v -> ... -> u inside the component closes the cycle
        std::vector<int> parent(n_, -1);
        std::vector<int> queue{v};
        parent[v] = v;
        for (std::size_t head = 0; head < queue.size(); ++head) {
          const int w = queue[head];
          if (w == u) break;
          for (int t = 0; t < n_; ++t) {
            if (t != w && active[t] && comp[t] == comp[u] && parent[t] == -1 &&
                rel_.weak_at(w, t)) {
              parent[t] = w;
              queue.push_back(t);
            }
          }
        }
        std::vector<int> cycle;
        for (int w = u; w != v; w = parent[w]) cycle.push_back(w);
        cycle.push_back(v);
        return cycle;
      }
    }
    return std::nullopt;
  }

  int greedy_consistent_size() {
    std::vector<char> active(n_, 1);
    int kept = n_;
    while (auto cyc = violating_cycle(active)) {
      int worst = (*cyc)[0];
      int worst_deg = -1;
      for (int v : *cyc) {
        int deg = 0;
        for (int u = 0; u < n_; ++u) {
          if (u != v && active[u] && (rel_.strict_at(u, v) || rel_.strict_at(v, u))) ++deg;
        }
        if (deg > worst_deg) {
          worst_deg = deg;
          worst = v;
        }
      }
      active[worst] = 0;
      --kept;
    }
    return kept;
  }

  void search(std::vector<char>& active, int kept, std::vector<char>& required) {
    if (++nodes_ > cap_) {
      throw SearchBudgetExceeded("hmi: node cap exceeded");
    }
    if (kept <= best_) return;
    const auto cyc = violating_cycle(active);
    if (!cyc) {
      best_ = kept;
      return;
    }
    std::vector<int> branchable;
    for (int v : *cyc) {
      if (!required[v]) branchable.push_back(v);
    }
    std::vector<int> committed;
    for (int v : branchable) {
      active[v] = 0;
      search(active, kept - 1, required);
      active[v] = 1;
      required[v] = 1;
      committed.push_back(v);
    }
    for (int v : committed) required[v] = 0;
  }

  RelationMatrix rel_;
  int n_;
  std::uint64_t cap_;
  std::uint64_t nodes_ = 0;
  int best_ = 0;
};

}  // namespace

HmiResult hmi(const ChoiceDataset& ds, std::uint64_t node_cap) {
  const int n = static_cast<int>(ds.rounds());
  HmiSearch search(direct_relations(ds, 1.0), node_cap);
  HmiResult result;
  result.kept = search.run();
  result.value = static_cast<double>(result.kept) / static_cast<double>(n);
  return result;
}

double mpi(const ChoiceDataset& ds) {
  const auto cycles = violation_two_cycles(ds);
  if (cycles.empty()) return 0.0;
  const std::size_t n = ds.rounds();
  const std::vector<double> cross = cross_cost_matrix(ds);
  double total = 0.0;
  for (const auto& [i, j] : cycles) {
    const double pump = (cross[i * n + i] - cross[i * n + j]) +
                        (cross[j * n + j] - cross[j * n + i]);
    total += pump / (cross[i * n + i] + cross[j * n + j]);
  }
  return total / static_cast<double>(cycles.size());
}

namespace {

struct MciEdge {
  int from = 0;
  int to = 0;
  double cost = 0.0;
};

// Branch and bound for the minimum-cost edge set breaking all cycles.
// Branches over the edges of one cycle at a time with the same sibling
// commitment scheme as the subset search.
class MciSearch {
 public:
  MciSearch(int n, std::vector<MciEdge> edges, std::uint64_t cap)
      : n_(n), edges_(std::move(edges)), cap_(cap) {
    adj_.resize(n_);
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      adj_[edges_[e].from].emplace_back(e, edges_[e].to);
    }
    removed_.assign(edges_.size(), 0);
    required_.assign(edges_.size(), 0);
  }

  // Returns (cost, exact).
  std::pair<double, bool> run() {
    best_ = greedy_cost();
    bool exact = true;
    try {
      search(0.0);
    } catch (const SearchBudgetExceeded&) {
      exact = false;
    }
    return {best_, exact};
  }

 private:
  // DFS over kept edges; returns the edge indices of one cycle, or empty.
  std::vector<int> find_cycle() const {
    std::vector<int> color(n_, 0);  // 0 white, 1 gray, 2 black
    std::vector<int> parent_edge(n_, -1);
    for (int s = 0; s < n_; ++s) {
      if (color[s] != 0) continue;
      std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
      color[s] = 1;
      while (!stack.empty()) {
        const int v = stack.back().first;
        std::size_t& next = stack.back().second;
        bool descended = false;
        while (next < adj_[v].size()) {
          const auto [eidx, to] = adj_[v][next++];
          if (removed_[eidx]) continue;
          if (color[to] == 1) {
            // back edge closes a cycle: to -> ... -> v -> to
            std::vector<int> cycle{eidx};
            for (int w = v; w != to; w = edges_[parent_edge[w]].from) {
              cycle.push_back(parent_edge[w]);
            }
            return cycle;
          }
          if (color[to] == 0) {
            color[to] = 1;
            parent_edge[to] = eidx;
            stack.emplace_back(to, 0);
            descended = true;
            break;
          }
        }
        if (!descended) {
          color[v] = 2;
          stack.pop_back();
        }
      }
    }
    return {};
  }

  double greedy_cost() {
    double cost = 0.0;
    std::vector<char> saved = removed_;
    for (;;) {
      const auto cycle = find_cycle();
      if (cycle.empty()) break;
      int cheapest = cycle.front();
      for (int e : cycle) {
        if (edges_[e].cost < edges_[cheapest].cost) cheapest = e;
      }
      removed_[cheapest] = 1;
      cost += edges_[cheapest].cost;
    }
    removed_ = std::move(saved);
    return cost;
  }

  void search(double acc) {
    if (++nodes_ > cap_) throw SearchBudgetExceeded("mci: node cap exceeded");
    if (acc >= best_) return;
    auto cycle = find_cycle();
    if (cycle.empty()) {
      best_ = acc;
      return;
    }
    std::vector<int> branchable;
    for (int e : cycle) {
      if (!required_[e]) branchable.push_back(e);
    }
    std::sort(branchable.begin(), branchable.end(),
              [this](int a, int b) { return edges_[a].cost < edges_[b].cost; });
    std::vector<int> committed;
    for (int e : branchable) {
      removed_[e] = 1;
      search(acc + edges_[e].cost);
      removed_[e] = 0;
      required_[e] = 1;
      committed.push_back(e);
    }
    for (int e : committed) required_[e] = 0;
  }

  int n_;
  std::vector<MciEdge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // from -> (edge idx, to)
  std::uint64_t cap_;
  std::uint64_t nodes_ = 0;
  std::vector<char> removed_;
  std::vector<char> required_;
  double best_ = 0.0;
};

}  // namespace

MciResult mci(const ChoiceDataset& ds, std::uint64_t node_cap) {
  const int n = static_cast<int>(ds.rounds());
  const RelationMatrix rel = direct_relations(ds, 1.0);
  const std::vector<double> cross = cross_cost_matrix(ds);

  // Only edges inside a strongly connected component can lie on a cycle.
  std::vector<char> all(n, 1);
  const std::vector<int> comp =
      scc_ids(n, all, [&rel](int a, int b) { return rel.weak_at(a, b); });

  std::vector<MciEdge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !rel.weak_at(i, j) || comp[i] != comp[j]) continue;
      const double cost = std::max(0.0, cross[i * n + i] - cross[i * n + j]);
      if (cost > 0.0) {
        edges.push_back({i, j, cost});
      }
      // zero-cost edges are dropped outright: removing them is free and
      // removal never creates a cycle
    }
  }

  double total_expenditure = 0.0;
  for (int t = 0; t < n; ++t) total_expenditure += cross[t * n + t];

  MciSearch search(n, std::move(edges), node_cap);
  const auto [cost, exact] = search.run();
  MciResult result;
  result.value = cost / total_expenditure;
  result.exact = exact;
  return result;
}

IndexReport index_report(const ChoiceDataset& ds, std::uint64_t node_cap) {
  IndexReport report;
  report.label = ds.label;
  report.ccei = ccei(ds);
  const HmiResult h = hmi(ds, node_cap);
  report.hmi = h.value;
  report.hmi_kept = h.kept;
  report.mpi = mpi(ds);
  const MciResult m = mci(ds, node_cap);
  report.mci = m.value;
  report.mci_exact = m.exact;
  const GarpReport garp = check_garp(ds, 1.0);
  report.violating_pairs = static_cast<int>(garp.violating_pairs.size());
  report.two_cycles = static_cast<int>(garp.two_cycles.size());
  return report;
}

std::string index_csv_header() {
  return "label,ccei,hmi,mpi,mci,hmi_kept,mci_exact,two_cycles";
}

std::string index_csv_row(const IndexReport& r) {
  std::string row = r.label;
  row += ',' + format_double(r.ccei);
  row += ',' + format_double(r.hmi);
  row += ',' + format_double(r.mpi);
  row += ',' + format_double(r.mci);
  row += ',' + std::to_string(r.hmi_kept);
  row += ',';
  row += r.mci_exact ? "true" : "false";
  row += ',' + std::to_string(r.two_cycles);
  return row;
}

}  // namespace revpref
