#include "rwle/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace rwle {

Graph Graph::from_edges(int n, std::vector<std::pair<int, int>> edges, Rng* port_rng,
                        std::vector<int> labels) {
  if (n < 1) throw InvalidSizeError("graph needs at least one node");
  for (auto& [u, v] : edges) {
    if (u == v) throw InvalidSpecError("self-loop at node " + std::to_string(u));
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidSpecError("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw InvalidSpecError("parallel edge");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw InvalidSpecError("label vector size mismatch");

  Graph g;
  g.edges_ = std::move(edges);
  g.labels_ = std::move(labels);
  g.ports_.resize(n);

  // Incident edge indices per node, then an independent permutation per node.
  std::vector<std::vector<int>> incident(n);
  for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
    incident[g.edges_[e].first].push_back(e);
    incident[g.edges_[e].second].push_back(e);
  }
  // Port index (1-based) each edge got on each side.
  std::vector<std::pair<int, int>> edge_ports(g.edges_.size(), {0, 0});
  for (int u = 0; u < n; ++u) {
    auto& inc = incident[u];
    if (port_rng) std::shuffle(inc.begin(), inc.end(), *port_rng);
    g.ports_[u].resize(inc.size());
    for (int p = 0; p < static_cast<int>(inc.size()); ++p) {
      int e = inc[p];
      if (g.edges_[e].first == u)
        edge_ports[e].first = p + 1;
      else
        edge_ports[e].second = p + 1;
    }
  }
  for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
    auto [u, v] = g.edges_[e];
    auto [ial, ibl] = edge_ports[e];
    g.ports_[u][ial - 1] = {v, ibl};
    g.ports_[v][ibl - 1] = {u, ial};
  }
  return g;
}

void Graph::set_labels(std::vector<int> labels) {
  if (!labels.empty() && static_cast<int>(labels.size()) != n())
    throw InvalidSpecError("label vector size mismatch");
  labels_ = std::move(labels);
}

bool Graph::connected() const {
  if (n() == 0) return false;
  std::vector<char> seen(n(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const auto& t : ports_[u]) {
      if (!seen[t.node]) {
        seen[t.node] = 1;
        ++count;
        stack.push_back(t.node);
      }
    }
  }
  return count == n();
}

bool Graph::two_connected() const {
  // n >= 3, connected, and no articulation point (Tarjan lowpoints).
  if (n() < 3 || !connected()) return false;
  std::vector<int> disc(n(), -1), low(n(), 0), parent(n(), -1);
  int timer = 0;
  // iterative DFS
  std::vector<std::pair<int, int>> stack;  // (node, next port index)
  disc[0] = low[0] = timer++;
  stack.push_back({0, 0});
  int root_children = 0;
  while (!stack.empty()) {
    auto& [u, i] = stack.back();
    if (i < degree(u)) {
      int v = ports_[u][i].node;
      ++i;
      if (disc[v] == -1) {
        parent[v] = u;
        if (u == 0) ++root_children;
        disc[v] = low[v] = timer++;
        stack.push_back({v, 0});
      } else if (v != parent[u]) {
        low[u] = std::min(low[u], disc[v]);
      }
    } else {
      stack.pop_back();
      if (!stack.empty()) {
        int p = stack.back().first;
        low[p] = std::min(low[p], low[u]);
        if (p != 0 && low[u] >= disc[p]) return false;  // articulation point
      }
    }
  }
  return root_children <= 1;
}

std::string Graph::serialize() const {
  std::ostringstream out;
  out << "graph " << n() << ' ' << m() << '\n';
  for (int u = 0; u < n(); ++u) out << "node " << u << ' ' << label(u) << '\n';
  for (const auto& [u, v] : edges_) {
    int pu = 0, pv = 0;
    for (int p = 1; p <= degree(u); ++p)
      if (ports_[u][p - 1].node == v) pu = p;
    pv = ports_[u][pu - 1].port;
    out << "edge " << u << ' ' << pu << ' ' << v << ' ' << pv << '\n';
  }
  return out.str();
}

Graph Graph::parse(std::istream& in) {
  std::string line;
  long lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("empty graph file", lineno);
  std::istringstream hdr(line);
  std::string kw;
  int n = 0, m = 0;
  if (!(hdr >> kw >> n >> m) || kw != "graph") throw ParseError("expected 'graph <n> <m>'", lineno);
  if (n < 1) throw ParseError("invalid node count", lineno);

  std::vector<int> labels(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!next_line()) throw ParseError("missing node line", lineno + 1);
    std::istringstream ls(line);
    int idx = 0, lab = 0;
    if (!(ls >> kw >> idx >> lab) || kw != "node" || idx != i)
      throw ParseError("expected 'node " + std::to_string(i) + " <label>'", lineno);
    labels[i] = lab;
  }
  bool any_label = std::any_of(labels.begin(), labels.end(), [](int l) { return l != -1; });

  struct RawEdge {
    int u, pu, v, pv;
  };
  std::vector<RawEdge> raw(m);
  for (int e = 0; e < m; ++e) {
    if (!next_line()) throw ParseError("missing edge line", lineno + 1);
    std::istringstream ls(line);
    RawEdge r{};
    if (!(ls >> kw >> r.u >> r.pu >> r.v >> r.pv) || kw != "edge")
      throw ParseError("expected 'edge <u> <port_u> <v> <port_v>'", lineno);
    if (r.u < 0 || r.u >= n || r.v < 0 || r.v >= n || r.u == r.v)
      throw ParseError("bad edge endpoints", lineno);
    if (r.pu < 1 || r.pv < 1) throw ParseError("ports are 1-based", lineno);
    raw[e] = r;
  }

  Graph g;
  g.ports_.resize(n);
  std::vector<int> deg(n, 0);
  for (const auto& r : raw) {
    deg[r.u] = std::max(deg[r.u], r.pu);
    deg[r.v] = std::max(deg[r.v], r.pv);
  }
  for (int u = 0; u < n; ++u) g.ports_[u].assign(deg[u], PortTarget{});
  for (const auto& r : raw) {
    auto [u, v] = std::minmax(r.u, r.v);
    int pu = (u == r.u) ? r.pu : r.pv;
    int pv = (u == r.u) ? r.pv : r.pu;
    g.edges_.emplace_back(u, v);
    if (g.ports_[u][pu - 1].node != -1 || g.ports_[v][pv - 1].node != -1)
      throw ParseError("port assigned twice", lineno);
    g.ports_[u][pu - 1] = {v, pv};
    g.ports_[v][pv - 1] = {u, pu};
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  if (std::adjacent_find(g.edges_.begin(), g.edges_.end()) != g.edges_.end())
    throw ParseError("parallel edge", lineno);
  if (any_label) g.labels_ = std::move(labels);
  g.check_invariants();
  return g;
}

void Graph::check_invariants() const {
  for (int u = 0; u < n(); ++u)
    for (int p = 1; p <= degree(u); ++p) {
      PortTarget t = ports_[u][p - 1];
      if (t.node < 0) throw ParseError("port gap at node " + std::to_string(u), 0);
      PortTarget back = ports_[t.node][t.port - 1];
      if (back.node != u || back.port != p)
        throw ParseError("port maps not mutually consistent", 0);
    }
}

Graph Graph::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

void Graph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << serialize();
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse(in);
}

}  // namespace rwle
