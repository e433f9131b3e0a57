#include "rwle/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace rwle {

Graph generate_clique(int n, uint64_t seed) {
  if (n < 2) throw InvalidSizeError("clique needs n >= 2");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  Rng rng = derive_stream(seed, 0x636c71);
  return Graph::from_edges(n, std::move(edges), &rng);
}

Graph generate_hypercube(int d, uint64_t seed) {
  if (d < 1) throw InvalidSizeError("hypercube needs dimension >= 1");
  if (d > 20) throw InvalidSizeError("hypercube dimension too large");
  int n = 1 << d;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(d) * n / 2);
  for (int u = 0; u < n; ++u)
    for (int b = 0; b < d; ++b) {
      int v = u ^ (1 << b);
      if (u < v) edges.emplace_back(u, v);
    }
  Rng rng = derive_stream(seed, 0x637562);
  return Graph::from_edges(n, std::move(edges), &rng);
}

Graph generate_ring(int n, uint64_t seed) {
  if (n < 3) throw InvalidSizeError("ring needs n >= 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
  Rng rng = derive_stream(seed, 0x726e67);
  return Graph::from_edges(n, std::move(edges), &rng);
}

Graph generate_random_regular(int n, int d, uint64_t seed) {
  if (n < 2 || d < 1) throw InvalidSizeError("random regular graph needs n >= 2, d >= 1");
  if (d >= n) throw InfeasibleDegreeError("degree must be < n");
  if ((static_cast<long>(n) * d) % 2 != 0)
    throw InfeasibleDegreeError("n*d must be even");

  Rng rng = derive_stream(seed, 0x726567);
  const int budget = 1000;
  for (int attempt = 0; attempt < budget; ++attempt) {
    // Pairing model: n*d half-edge stubs, uniform perfect matching.
    std::vector<int> stubs(static_cast<size_t>(n) * d);
    for (int i = 0; i < n; ++i)
      std::fill_n(stubs.begin() + static_cast<size_t>(i) * d, d, i);
    std::shuffle(stubs.begin(), stubs.end(), rng);

    std::set<std::pair<int, int>> edge_set;
    bool simple = true;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) { simple = false; break; }
      auto e = std::minmax(u, v);
      if (!edge_set.emplace(e.first, e.second).second) { simple = false; break; }
    }
    if (!simple) continue;
    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    Rng port_rng = derive_stream(seed, 0x726568 + attempt);
    Graph g = Graph::from_edges(n, std::move(edges), &port_rng);
    if (g.connected()) return g;
  }
  throw GenerationFailureError("pairing model retry budget exhausted");
}

double LowerBoundSpec::epsilon() const {
  return std::log2(1.0 / alpha) / (2.0 * std::log2(static_cast<double>(n)));
}

int LowerBoundSpec::clique_size() const {
  // n^epsilon = sqrt(1/alpha); nudge so exact integers survive fp rounding
  double v = std::sqrt(1.0 / alpha);
  return static_cast<int>(std::ceil(v - 1e-9));
}

int LowerBoundSpec::super_nodes() const {
  double v = static_cast<double>(n) * std::sqrt(alpha);
  return static_cast<int>(std::floor(v + 1e-9));
}

std::vector<std::string> LowerBoundSpec::validate() const {
  if (n < 2) throw InvalidSpecError("lower-bound spec needs n >= 2");
  if (!(alpha > 1.0 / (static_cast<double>(n) * n)) || !(alpha < 1.0))
    throw InvalidSpecError("alpha must lie in (1/n^2, 1)");
  int k = clique_size();
  int N = super_nodes();
  if (k < 4)
    throw InvalidSpecError("clique size " + std::to_string(k) +
                           " < 4: cannot attach four inter-clique edges to distinct nodes");
  if (N < 5)
    throw InvalidSpecError("super-node count " + std::to_string(N) +
                           " < 5: no simple 4-regular graph exists");
  std::vector<std::string> warnings;
  if (alpha >= 1.0 / 144.0)
    warnings.push_back("alpha >= 1/144 is outside the analyzed parameter range");
  if (k == 4)
    warnings.push_back("clique_size = 4: all clique nodes are external-edged and the "
                       "two removed edges leave only two intra-clique edges");
  return warnings;
}

Graph generate_lower_bound_graph(const LowerBoundSpec& spec, uint64_t seed) {
  spec.validate();
  const int k = spec.clique_size();
  const int N = spec.super_nodes();

  Graph super = generate_random_regular(N, 4, mix64(seed ^ 0x5350ULL));
  Rng rng = derive_stream(seed, 0x6c6277);

  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels(static_cast<size_t>(N) * k);
  for (int c = 0; c < N; ++c) {
    int base = c * k;
    for (int i = 0; i < k; ++i) labels[base + i] = c;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) edges.emplace_back(base + i, base + j);
  }

  // Each super-node edge lands on a distinct, uniformly chosen, previously
  // unchosen node of the clique.
  std::vector<std::vector<int>> unchosen(N);
  std::vector<std::vector<int>> externals(N);
  for (int c = 0; c < N; ++c) {
    unchosen[c].resize(k);
    std::iota(unchosen[c].begin(), unchosen[c].end(), c * k);
  }
  auto draw_node = [&](int c) {
    long i = rng.next_index(static_cast<long>(unchosen[c].size()));
    int node = unchosen[c][i];
    unchosen[c][i] = unchosen[c].back();
    unchosen[c].pop_back();
    externals[c].push_back(node);
    return node;
  };
  for (const auto& [a, b] : super.edges())
    edges.emplace_back(draw_node(a), draw_node(b));

  // Remove two intra-clique edges pairing up the four external-edged nodes.
  std::set<std::pair<int, int>> removed;
  for (int c = 0; c < N; ++c) {
    auto& ext = externals[c];
    std::shuffle(ext.begin(), ext.end(), rng);
    removed.insert(std::minmax(ext[0], ext[1]));
    removed.insert(std::minmax(ext[2], ext[3]));
  }
  std::erase_if(edges, [&](const std::pair<int, int>& e) {
    return removed.count(std::minmax(e.first, e.second)) > 0;
  });

  Rng port_rng = derive_stream(seed, 0x6c6278);
  return Graph::from_edges(N * k, std::move(edges), &port_rng, std::move(labels));
}

Dumbbell generate_dumbbell(const Graph& g0, uint64_t seed) {
  if (!g0.two_connected()) throw PreconditionError("dumbbell base graph must be 2-connected");
  const int m = g0.n();

  auto make_copy = [&](uint64_t salt) {
    Rng rng = derive_stream(seed, salt);
    return Graph::from_edges(m, g0.edges(), &rng);
  };
  Graph left = make_copy(0x644c);
  Graph right = make_copy(0x6452);

  Rng pick = derive_stream(seed, 0x6445);
  auto e_left = left.edges()[pick.next_index(left.m())];
  auto e_right = right.edges()[pick.next_index(right.m())];

  // Combined edge list: both halves minus their opened edges, plus the two
  // bridges pairing endpoints in index order (v,v'') and (w,w'').
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : left.edges())
    if (e != e_left) edges.push_back(e);
  for (const auto& e : right.edges())
    if (e != e_right) edges.emplace_back(e.first + m, e.second + m);
  edges.emplace_back(e_left.first, e_right.first + m);
  edges.emplace_back(e_left.second, e_right.second + m);

  // Ports must match the standalone copies exactly, bridge ports reusing the
  // opened ports, so each half is indistinguishable from its closed graph.
  Dumbbell out;
  out.half_size = m;
  out.opened_left = e_left;
  out.opened_right = e_right;
  out.left_standalone = left;
  out.right_standalone = right;

  std::vector<int> labels(2 * m, 0);
  std::fill(labels.begin() + m, labels.end(), 1);

  // Build by explicit port transfer rather than re-permutation.
  std::ostringstream text;
  text << "graph " << 2 * m << ' ' << edges.size() << '\n';
  for (int i = 0; i < 2 * m; ++i) text << "node " << i << ' ' << labels[i] << '\n';
  auto port_of = [](const Graph& g, int u, int v) {
    for (int p = 1; p <= g.degree(u); ++p)
      if (g.peer(u, p).node == v) return p;
    throw Error("edge not found");
  };
  std::sort(edges.begin(), edges.end());
  for (const auto& [u, v] : edges) {
    int pu, pv;
    if (u < m && v < m) {
      pu = port_of(left, u, v);
      pv = port_of(left, v, u);
    } else if (u >= m && v >= m) {
      pu = port_of(right, u - m, v - m);
      pv = port_of(right, v - m, u - m);
    } else if (u == e_left.first) {  // bridge (v, v'')
      pu = port_of(left, e_left.first, e_left.second);
      pv = port_of(right, e_right.first, e_right.second);
    } else {  // bridge (w, w'')
      pu = port_of(left, e_left.second, e_left.first);
      pv = port_of(right, e_right.second, e_right.first);
    }
    text << "edge " << u << ' ' << pu << ' ' << v << ' ' << pv << '\n';
  }
  out.graph = Graph::parse_string(text.str());
  return out;
}

}  // namespace rwle
