#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwle/graph.hpp"

namespace rwle {

Graph generate_clique(int n, uint64_t seed);
Graph generate_hypercube(int d, uint64_t seed);
Graph generate_ring(int n, uint64_t seed);

// Pairing (configuration) model with full rejection of self-loops,
// multi-edges and disconnected samples; retry budget 1000.
Graph generate_random_regular(int n, int d, uint64_t seed);

// Parameters of the low-conductance clique-of-cliques family: a random
// 4-regular graph on N super-nodes, each super-node expanded into a clique.
// With epsilon = log2(1/alpha) / (2 log2 n) the clique size n^epsilon equals
// sqrt(1/alpha) exactly, which is how the derived fields are computed.
struct LowerBoundSpec {
  int n = 0;
  double alpha = 0.0;

  double epsilon() const;
  int super_nodes() const;  // N = floor(n^(1-epsilon))
  int clique_size() const;  // ceil(n^epsilon)

  // Throws InvalidSpecError on structurally impossible parameters; returns
  // human-readable warnings for admissible-but-degenerate regimes
  // (alpha >= 1/144 outside the analyzed range, or clique_size == 4 where
  // every clique node is external-edged).
  std::vector<std::string> validate() const;
};

// Expands the 4-regular super-node graph into cliques: each super-node edge
// attaches to a distinct uniformly chosen clique node, and two intra-clique
// edges between the four external-edged nodes are removed so degrees stay
// uniform. Nodes are labeled with their clique id.
Graph generate_lower_bound_graph(const LowerBoundSpec& spec, uint64_t seed);

struct Dumbbell {
  Graph graph;            // 2|g0| nodes, halves labeled 0/1, two bridge edges
  Graph left_standalone;  // the closed graph each half is indistinguishable from
  Graph right_standalone;
  int half_size = 0;
  std::pair<int, int> opened_left;   // erased edge of the left copy
  std::pair<int, int> opened_right;  // erased edge (local indices) of the right copy
};

// Two copies of a 2-connected g0 with independent port maps, one edge erased
// from each, and the four open ports joined by two bridge edges paired in
// endpoint index order.
Dumbbell generate_dumbbell(const Graph& g0, uint64_t seed);

}  // namespace rwle
