#include "autog/graph.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace autog {

NetworkGraph::NetworkGraph(int n_units, std::vector<std::pair<int, int>> edges)
    : n_(n_units) {
  if (n_ < 0) throw std::invalid_argument("n_units must be nonnegative");
  adj_.resize(n_);
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop edge");
    if (a < 0 || b < 0 || a >= n_ || b >= n_)
      throw std::out_of_range("edge index out of range");
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;  // each pair stored once
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  edges_.assign(seen.begin(), seen.end());
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

void NetworkGraph::check_index(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("unit index out of range");
}

const std::vector<int>& NetworkGraph::neighbors(int i) const {
  check_index(i);
  return adj_[i];
}

int NetworkGraph::max_degree() const {
  int m = 0;
  for (const auto& nb : adj_) m = std::max(m, static_cast<int>(nb.size()));
  return m;
}

bool NetworkGraph::has_edge(int i, int j) const {
  check_index(i);
  check_index(j);
  return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::set<int> NetworkGraph::kth_neighborhood(int i, int k) const {
  check_index(i);
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<char> taken(n_, 0);
  taken[i] = 1;
  std::set<int> frontier(adj_[i].begin(), adj_[i].end());
  for (int j : frontier) taken[j] = 1;
  for (int order = 2; order <= k; ++order) {
    std::set<int> next;
    for (int j : frontier)
      for (int m : adj_[j])
        if (!taken[m]) next.insert(m);
    for (int m : next) taken[m] = 1;
    frontier = std::move(next);
  }
  return frontier;
}

bool is_stable(const NetworkGraph& g, const std::vector<int>& s) {
  for (size_t a = 0; a < s.size(); ++a)
    for (size_t b = a + 1; b < s.size(); ++b)
      if (g.has_edge(s[a], s[b])) return false;
  return true;
}

StableSet find_max_stable_set(const NetworkGraph& g, int restarts,
                              std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const int n = g.n_units();
  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best;
  std::vector<char> blocked(n);
  for (int r = 0; r < restarts; ++r) {
    std::shuffle(order.begin(), order.end(), rng);
    std::fill(blocked.begin(), blocked.end(), 0);
    std::vector<int> cur;
    for (int i : order) {
      if (blocked[i]) continue;
      cur.push_back(i);
      for (int j : g.neighbors(i)) blocked[j] = 1;
    }
    if (cur.size() > best.size()) best = std::move(cur);
  }
  std::sort(best.begin(), best.end());
  return StableSet{std::move(best), n, true};
}

NetworkGraph random_graph(int n, int degree_min, int degree_max,
                          std::uint64_t seed, int max_retries) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  if (degree_min > degree_max || degree_min < 0 || degree_max >= n)
    throw std::invalid_argument("infeasible degree range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> deg_dist(degree_min, degree_max);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<int> deg(n);
    for (int i = 0; i < n; ++i) deg[i] = deg_dist(rng);
    int total = std::accumulate(deg.begin(), deg.end(), 0);
    if (total % 2 != 0) {
      // adjust one unit within range to make the stub count even
      bool fixed = false;
      for (int i = 0; i < n && !fixed; ++i) {
        if (deg[i] < degree_max) { ++deg[i]; fixed = true; }
        else if (deg[i] > degree_min) { --deg[i]; fixed = true; }
      }
      if (!fixed) continue;  // degenerate range with odd total
    }
    std::vector<int> stubs;
    for (int i = 0; i < n; ++i) stubs.insert(stubs.end(), deg[i], i);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    // pair stubs; collect self-loops and duplicate edges for repair
    std::set<std::pair<int, int>> edge_set;
    std::vector<std::pair<int, int>> bad;
    for (size_t s = 0; s + 1 < stubs.size(); s += 2) {
      int a = stubs[s], b = stubs[s + 1];
      if (a > b) std::swap(a, b);
      if (a == b || !edge_set.insert({a, b}).second) bad.emplace_back(a, b);
    }
    // repair by degree-preserving 2-swaps against random accepted edges:
    // replace the colliding pair (a,b) and an accepted (c,d) with (a,c),(b,d)
    std::vector<std::pair<int, int>> good(edge_set.begin(), edge_set.end());
    bool ok = true;
    for (auto [a, b] : bad) {
      bool fixed = false;
      for (int tr = 0; tr < 500 && !fixed && !good.empty(); ++tr) {
        const size_t idx = rng() % good.size();
        auto [c, d] = good[idx];
        if (rng() & 1) std::swap(c, d);
        if (a == c || b == d) continue;
        const auto e1 = std::minmax(a, c);
        const auto e2 = std::minmax(b, d);
        if (e1 == e2 || edge_set.count(e1) || edge_set.count(e2)) continue;
        edge_set.erase(std::minmax(good[idx].first, good[idx].second));
        edge_set.insert(e1);
        edge_set.insert(e2);
        good[idx] = e1;
        good.push_back(e2);
        fixed = true;
      }
      if (!fixed) { ok = false; break; }
    }
    if (!ok) continue;
    return NetworkGraph(n, {edge_set.begin(), edge_set.end()});
  }
  throw std::runtime_error("random_graph: infeasible degree sequence after retries");
}

NetworkGraph remove_random_edges(const NetworkGraph& g, double fraction,
                                 std::uint64_t seed) {
  if (fraction < 0.0 || fraction >= 1.0)
    throw std::invalid_argument("fraction must lie in [0,1)");
  auto edges = g.edges();
  const int drop = static_cast<int>(fraction * edges.size());
  std::mt19937_64 rng(seed);
  std::shuffle(edges.begin(), edges.end(), rng);
  edges.resize(edges.size() - drop);
  return NetworkGraph(g.n_units(), std::move(edges));
}

}  // namespace autog
