#pragma once

#include "rwle/generators.hpp"
#include "rwle/leader.hpp"

namespace rwle {

struct ProbeMetrics {
  std::vector<long> probes_until_crossing;
  double mean = 0;
  double stderr_ = 0;
  double analytic_expectation = 0;  // hypergeometric first success, (P+1)/(K+1)
  long total_ports = 0;             // ports of one clique (uniform by construction)
  long inter_ports = 0;
};

// Blind discovery cost of an inter-clique edge: a uniformly random clique
// sends one unit over a uniformly random previously-unused port until an
// inter-clique edge is hit, counted per trial against the exact expectation.
ProbeMetrics blind_probe_experiment(const Graph& g, int trials, uint64_t seed);

struct LbSeedRow {
  uint64_t seed = 0;
  long total_units = 0;
  long rounds = 0;
  int leaders = 0;
  long cg_edges = 0;        // distinct clique pairs that exchanged a message
  long crossings = 0;       // inter-clique units sent
  bool budget_exhausted = false;
};

struct LbElectionReport {
  int n = 0;
  double alpha = 0;
  std::vector<LbSeedRow> rows;
};

// Leader election on freshly generated lower-bound graphs, one per seed,
// with clique-communication-graph statistics from the engine's crossing
// bookkeeping.
LbElectionReport election_on_lower_bound(const LowerBoundSpec& spec, const ProtocolConfig& base,
                                         const std::vector<uint64_t>& seeds, SimConfig sim_base);

struct DumbbellSeedRow {
  uint64_t seed = 0;
  int leaders_misinformed = 0;
  int leaders_control = 0;
  long first_crossing_round = -1;
  bool replay_left_identical = false;
  bool replay_right_identical = false;
  bool control_budget_exhausted = false;
};

struct DumbbellReport {
  std::vector<DumbbellSeedRow> rows;
  int two_leader_runs = 0;       // misinformed runs electing one leader per half
  int control_at_most_one = 0;
};

// The n-knowledge demonstration: on Dumbbell(g0,g0) with disjoint id spaces,
// every node is told n = |g0|. Each half then behaves exactly like a
// standalone run on the closed copy until the first bridge crossing, which
// the per-half trace replay verifies byte for byte. A correct-n control runs
// on the same graphs.
DumbbellReport dumbbell_misinformation_experiment(const Graph& g0, const ProtocolConfig& base,
                                                  const std::vector<uint64_t>& seeds,
                                                  long budget_misinformed, long budget_control);

// Simple graph over clique ids with an edge per inter-clique pair that
// exchanged at least one envelope in the trace.
std::vector<std::pair<int, int>> clique_communication_graph(const std::vector<TraceRecord>& trace,
                                                            const Graph& g);

}  // namespace rwle
