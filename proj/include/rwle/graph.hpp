#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rwle/errors.hpp"
#include "rwle/rng.hpp"

namespace rwle {

struct PortTarget {
  int node = -1;
  int port = 0;  // 1-based port on the peer's side
};

// Undirected simple graph with explicit per-node port numbering.
// Node u addresses its deg(u) incident edges through ports 1..deg(u); the
// numbering on the two sides of an edge is independent (asymmetric).
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an edge list. When port_rng is non-null every node's
  // port order is an independent uniform permutation of its incident edges;
  // otherwise ports follow edge-list order. Rejects self-loops, parallel
  // edges and out-of-range endpoints.
  static Graph from_edges(int n, std::vector<std::pair<int, int>> edges,
                          Rng* port_rng = nullptr, std::vector<int> labels = {});

  int n() const { return static_cast<int>(ports_.size()); }
  int m() const { return static_cast<int>(edges_.size()); }
  int degree(int u) const { return static_cast<int>(ports_[u].size()); }
  // Peer endpoint of u's port p (1-based).
  PortTarget peer(int u, int port) const { return ports_[u][port - 1]; }

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool labeled() const { return !labels_.empty(); }
  int label(int u) const { return labels_.empty() ? -1 : labels_[u]; }
  const std::vector<int>& labels() const { return labels_; }
  void set_labels(std::vector<int> labels);

  bool connected() const;
  bool two_connected() const;

  long volume() const { return 2L * m(); }

  // Line-oriented text format:
  //   graph <n> <m>
  //   node <idx> <label>
  //   edge <u> <port_u> <v> <port_v>
  // Writing is canonical (edges sorted), so write -> read -> write is the
  // identity on bytes.
  std::string serialize() const;
  static Graph parse(std::istream& in);
  static Graph parse_string(const std::string& text);
  void save(const std::string& path) const;
  static Graph load(const std::string& path);

 private:
  std::vector<std::vector<PortTarget>> ports_;
  std::vector<std::pair<int, int>> edges_;  // canonical (min,max), sorted
  std::vector<int> labels_;

  void check_invariants() const;
};

}  // namespace rwle
