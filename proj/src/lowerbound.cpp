#include "rwle/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace rwle {

ProbeMetrics blind_probe_experiment(const Graph& g, int trials, uint64_t seed) {
  if (!g.labeled()) throw MissingLabelError("blind probe needs clique labels");
  if (trials < 0) throw InvalidSpecError("trials must be >= 0");

  int cliques = 0;
  for (int u = 0; u < g.n(); ++u) cliques = std::max(cliques, g.label(u) + 1);
  std::vector<std::vector<std::pair<int, int>>> ports(cliques);  // (node, port)
  std::vector<long> inter(cliques, 0);
  for (int u = 0; u < g.n(); ++u)
    for (int p = 1; p <= g.degree(u); ++p) {
      ports[g.label(u)].push_back({u, p});
      if (g.label(g.peer(u, p).node) != g.label(u)) inter[g.label(u)] += 1;
    }

  ProbeMetrics pm;
  pm.total_ports = static_cast<long>(ports[0].size());
  pm.inter_ports = inter[0];
  double expect = 0;
  for (int c = 0; c < cliques; ++c)
    expect += (static_cast<double>(ports[c].size()) + 1.0) / (static_cast<double>(inter[c]) + 1.0);
  pm.analytic_expectation = expect / cliques;
  if (trials == 0) return pm;

  Rng rng = derive_stream(seed, 0x70726f);
  for (int t = 0; t < trials; ++t) {
    int c = static_cast<int>(rng.next_index(cliques));
    auto order = ports[c];  // partial Fisher-Yates, without replacement
    long draws = 0;
    for (size_t i = 0; i < order.size(); ++i) {
      size_t j = i + static_cast<size_t>(rng.next_index(static_cast<long>(order.size() - i)));
      std::swap(order[i], order[j]);
      ++draws;
      auto [u, p] = order[i];
      if (g.label(g.peer(u, p).node) != g.label(u)) break;
    }
    pm.probes_until_crossing.push_back(draws);
  }
  double sum = 0;
  for (long v : pm.probes_until_crossing) sum += static_cast<double>(v);
  pm.mean = sum / trials;
  double ss = 0;
  for (long v : pm.probes_until_crossing) {
    double d = static_cast<double>(v) - pm.mean;
    ss += d * d;
  }
  if (trials > 1) pm.stderr_ = std::sqrt(ss / (trials - 1)) / std::sqrt(static_cast<double>(trials));
  return pm;
}

LbElectionReport election_on_lower_bound(const LowerBoundSpec& spec, const ProtocolConfig& base,
                                         const std::vector<uint64_t>& seeds, SimConfig sim_base) {
  LbElectionReport report;
  report.n = spec.n;
  report.alpha = spec.alpha;
  for (uint64_t seed : seeds) {
    Graph g = generate_lower_bound_graph(spec, seed);
    ProtocolConfig cfg = base;
    cfg.n = g.n();
    SimConfig sc = sim_base;
    sc.seed = seed;
    ElectionRun run = run_leader_election(g, cfg, sc);
    LbSeedRow row;
    row.seed = seed;
    row.total_units = run.metrics.total_units;
    row.rounds = run.metrics.rounds_elapsed;
    row.leaders = run.outcome.leaders;
    row.cg_edges = static_cast<long>(run.metrics.crossing_pairs.size());
    row.crossings = run.metrics.label_crossings;
    row.budget_exhausted = run.outcome.budget_exhausted;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string trace_line(const TraceRecord& r, int node_shift) {
  std::ostringstream s;
  s << r.round << ' ' << (r.from - node_shift) << ' ' << r.from_port << ' '
    << (r.to - node_shift) << ' ' << r.to_port << ' ' << r.tag << ' ' << r.units << ' '
    << r.final_unit << ' ' << r.origin << ' ' << r.phase;
  return s.str();
}

// Per-half prefix of a dumbbell trace before the first bridge crossing,
// rendered with half-local node indices.
std::vector<std::string> half_prefix(const std::vector<TraceRecord>& trace, long cutoff, int lo,
                                     int hi, int shift) {
  std::vector<std::string> out;
  for (const auto& r : trace) {
    if (cutoff >= 0 && r.round >= cutoff) break;
    if (r.from >= lo && r.from < hi && r.to >= lo && r.to < hi)
      out.push_back(trace_line(r, shift));
  }
  return out;
}

std::vector<std::string> whole_prefix(const std::vector<TraceRecord>& trace, long cutoff) {
  std::vector<std::string> out;
  for (const auto& r : trace) {
    if (cutoff >= 0 && r.round >= cutoff) break;
    out.push_back(trace_line(r, 0));
  }
  return out;
}

}  // namespace

DumbbellReport dumbbell_misinformation_experiment(const Graph& g0, const ProtocolConfig& base,
                                                  const std::vector<uint64_t>& seeds,
                                                  long budget_misinformed, long budget_control) {
  DumbbellReport report;
  const int m = g0.n();
  const uint64_t mm = static_cast<uint64_t>(m);
  const uint64_t id_span = mm * mm * mm * mm;

  for (uint64_t seed : seeds) {
    Dumbbell dm = generate_dumbbell(g0, seed);
    DumbbellSeedRow row;
    row.seed = seed;

    // Misinformed run: every node is told n = |g0|; the halves draw ids from
    // disjoint ranges and use per-half randomness streams that standalone
    // runs can reproduce.
    ProtocolConfig mis = base;
    mis.n = m;
    mis.id_offset_by_label = {0, id_span};
    SimConfig mcfg;
    mcfg.seed = seed;
    mcfg.record_trace = true;
    mcfg.round_budget = budget_misinformed;
    mcfg.b_bits = word_bits(m);
    mcfg.stream_salts.resize(2 * m);
    for (int i = 0; i < m; ++i) mcfg.stream_salts[i] = static_cast<uint64_t>(i);
    for (int i = 0; i < m; ++i)
      mcfg.stream_salts[m + i] = (1ULL << 32) + static_cast<uint64_t>(i);
    ElectionRun mis_run = run_leader_election(dm.graph, mis, mcfg);
    row.leaders_misinformed = mis_run.outcome.leaders;
    row.first_crossing_round = mis_run.metrics.first_crossing_round;

    // Standalone replays of each half on its closed graph.
    auto standalone = [&](const Graph& closed, bool right) {
      Graph g = closed;
      g.set_labels(std::vector<int>(m, 0));
      ProtocolConfig scfg = base;
      scfg.n = m;
      scfg.id_offset_by_label = {right ? id_span : 0};
      SimConfig sc;
      sc.seed = seed;
      sc.record_trace = true;
      sc.round_budget = budget_misinformed;
      sc.b_bits = word_bits(m);
      if (right) {
        sc.stream_salts.resize(m);
        for (int i = 0; i < m; ++i) sc.stream_salts[i] = (1ULL << 32) + static_cast<uint64_t>(i);
      }
      return run_leader_election(g, scfg, sc);
    };
    ElectionRun left_run = standalone(dm.left_standalone, false);
    ElectionRun right_run = standalone(dm.right_standalone, true);

    long cutoff = row.first_crossing_round;
    row.replay_left_identical =
        half_prefix(mis_run.trace, cutoff, 0, m, 0) == whole_prefix(left_run.trace, cutoff);
    row.replay_right_identical =
        half_prefix(mis_run.trace, cutoff, m, 2 * m, m) == whole_prefix(right_run.trace, cutoff);

    // Control: same dumbbell, nodes told the true size.
    ProtocolConfig ctrl = base;
    ctrl.n = 2 * m;
    SimConfig ccfg;
    ccfg.seed = seed;
    ccfg.round_budget = budget_control;
    ElectionRun ctrl_run = run_leader_election(dm.graph, ctrl, ccfg);
    row.leaders_control = ctrl_run.outcome.leaders;
    row.control_budget_exhausted = ctrl_run.outcome.budget_exhausted;

    if (row.leaders_misinformed >= 2) report.two_leader_runs += 1;
    if (row.leaders_control <= 1) report.control_at_most_one += 1;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<std::pair<int, int>> clique_communication_graph(const std::vector<TraceRecord>& trace,
                                                            const Graph& g) {
  if (!g.labeled()) throw MissingLabelError("clique communication graph needs labels");
  std::set<std::pair<int, int>> pairs;
  for (const auto& r : trace) {
    int a = g.label(r.from), b = g.label(r.to);
    if (a != b) pairs.insert(std::minmax(a, b));
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace rwle
