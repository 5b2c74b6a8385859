#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace autog {

// Undirected graph over N units. Immutable after construction; adjacency is
// stored both as a sorted edge list and as per-unit neighbor lists.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(int n_units, std::vector<std::pair<int, int>> edges);

  int n_units() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<int>& neighbors(int i) const;
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  int max_degree() const;
  bool has_edge(int i, int j) const;

  // Kth-order neighborhood: units first reachable at graph distance exactly k.
  std::set<int> kth_neighborhood(int i, int k) const;

 private:
  void check_index(int i) const;

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

struct StableSet {
  std::vector<int> members;  // sorted unit indices
  int graph_n = 0;
  bool maximal = false;
};

bool is_stable(const NetworkGraph& g, const std::vector<int>& s);

// Randomized-greedy search for a large maximal stable set: shuffle the unit
// order, add each unit not adjacent to the current set, keep the largest set
// over `restarts` attempts. Ties broken by first occurrence.
StableSet find_max_stable_set(const NetworkGraph& g, int restarts = 64,
                              std::uint64_t seed = 0);

// Random graph with every degree in [degree_min, degree_max]: stub pairing on
// a sampled degree sequence, whole-attempt rejection of self-loops and
// multi-edges, bounded retries.
NetworkGraph random_graph(int n, int degree_min, int degree_max,
                          std::uint64_t seed, int max_retries = 1000);

NetworkGraph remove_random_edges(const NetworkGraph& g, double fraction,
                                 std::uint64_t seed);

}  // namespace autog
