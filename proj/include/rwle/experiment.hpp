#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rwle/broadcast.hpp"
#include "rwle/leader.hpp"

namespace rwle {

struct GraphSpec {
  std::string family;  // clique | hypercube | ring | random-regular | lower-bound | file
  int n = 0;
  int d = 0;
  double alpha = 0;
  uint64_t seed = 1;
  std::string file;
  std::string name() const;
};

Graph build_graph(const GraphSpec& spec);
GraphSpec graph_spec_from_json(const std::string& json_text);

struct ExperimentSpec {
  std::vector<GraphSpec> graphs;
  double c1 = 2.0, c2 = 3.0;
  long initial_walk_length = 1;
  Mode mode = Mode::kCongest;
  std::vector<uint64_t> seeds;
  long round_budget = 5'000'000;
  bool explicit_broadcast = false;
  bool analyze = true;  // compute t_mix-based normalizer columns when feasible
  std::string out_csv, out_json;

  static ExperimentSpec from_json_text(const std::string& text);
};

struct ExperimentRow {
  std::string graph;
  int n = 0, m = 0;
  uint64_t seed = 0;
  Mode mode = Mode::kCongest;
  long rounds = 0;
  long total_units = 0;
  std::string outcome;
  int leaders = 0;
  long t_mix = -1;  // -1 = not computed
  std::optional<double> units_norm;   // units / (sqrt(n) (log2 n)^3.5 t_mix)
  std::optional<double> rounds_norm;  // rounds / (t_mix (log2 n)^2)
};

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentRow& row);

std::string metrics_to_json(const std::string& graph_name, int n, int m, uint64_t seed, Mode mode,
                            const RunMetrics& metrics, const ElectionOutcome* outcome,
                            const BroadcastResult* broadcast);
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);

// Resolves a relative output path against RWLE_OUT_DIR when set.
std::string resolve_output_path(const std::string& path);

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

}  // namespace rwle
