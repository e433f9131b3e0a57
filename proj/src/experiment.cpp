#include "rwle/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "rwle/analysis.hpp"
#include "rwle/generators.hpp"

namespace rwle {

using nlohmann::json;

const char* mode_name(Mode mode) { return mode == Mode::kCongest ? "congest" : "relaxed"; }

Mode mode_from_name(const std::string& name) {
  if (name == "congest") return Mode::kCongest;
  if (name == "relaxed") return Mode::kRelaxed;
  throw InvalidSpecError("unknown mode '" + name + "'");
}

std::string GraphSpec::name() const {
  if (family == "file") return file;
  std::ostringstream s;
  s << family << "-n" << n;
  if (d > 0) s << "-d" << d;
  if (alpha > 0) s << "-a" << alpha;
  s << "-g" << seed;
  return s.str();
}

Graph build_graph(const GraphSpec& spec) {
  if (spec.family == "clique") return generate_clique(spec.n, spec.seed);
  if (spec.family == "hypercube") return generate_hypercube(spec.d, spec.seed);
  if (spec.family == "ring") return generate_ring(spec.n, spec.seed);
  if (spec.family == "random-regular") return generate_random_regular(spec.n, spec.d, spec.seed);
  if (spec.family == "lower-bound") {
    LowerBoundSpec lb{spec.n, spec.alpha};
    return generate_lower_bound_graph(lb, spec.seed);
  }
  if (spec.family == "file") return Graph::load(spec.file);
  throw InvalidSpecError("unknown graph family '" + spec.family + "'");
}

static GraphSpec graph_spec_from(const json& j) {
  GraphSpec gs;
  gs.family = j.value("family", "file");
  gs.n = j.value("n", 0);
  gs.d = j.value("d", 0);
  gs.alpha = j.value("alpha", 0.0);
  gs.seed = j.value("seed", uint64_t{1});
  gs.file = j.value("file", std::string{});
  return gs;
}

GraphSpec graph_spec_from_json(const std::string& text) {
  return graph_spec_from(json::parse(text));
}

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentSpec spec;
  for (const auto& g : j.at("graphs")) spec.graphs.push_back(graph_spec_from(g));
  if (j.contains("protocol")) {
    const auto& p = j["protocol"];
    spec.c1 = p.value("c1", 2.0);
    spec.c2 = p.value("c2", 3.0);
    spec.initial_walk_length = p.value("initial_walk_length", 1L);
  }
  spec.mode = mode_from_name(j.value("mode", "congest"));
  if (j.contains("seeds")) {
    if (j["seeds"].is_array()) {
      for (const auto& s : j["seeds"]) spec.seeds.push_back(s.get<uint64_t>());
    } else {
      uint64_t start = j["seeds"].value("start", uint64_t{1});
      long count = j["seeds"].value("count", 1L);
      for (long i = 0; i < count; ++i) spec.seeds.push_back(start + static_cast<uint64_t>(i));
    }
  }
  if (spec.seeds.empty()) throw InvalidSpecError("experiment needs at least one seed");
  spec.round_budget = j.value("round_budget", 5'000'000L);
  spec.explicit_broadcast = j.value("explicit", false);
  spec.analyze = j.value("analyze", true);
  spec.out_csv = j.value("out_csv", std::string{});
  spec.out_json = j.value("out_json", std::string{});
  return spec;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  std::vector<ExperimentRow> rows;
  for (const auto& gs : spec.graphs) {
    Graph g = build_graph(gs);
    long t_mix = -1;
    if (spec.analyze && g.n() <= 4096) {
      try {
        t_mix = mixing_time_exact(g);
      } catch (const Error&) {
        t_mix = -1;
      }
    }
    double log2n = std::log2(static_cast<double>(g.n()));
    for (uint64_t seed : spec.seeds) {
      ProtocolConfig cfg;
      cfg.c1 = spec.c1;
      cfg.c2 = spec.c2;
      cfg.initial_walk_length = spec.initial_walk_length;
      cfg.n = g.n();
      SimConfig sc;
      sc.seed = seed;
      sc.mode = spec.mode;
      sc.round_budget = spec.round_budget;
      ElectionRun run = run_leader_election(g, cfg, sc);

      ExperimentRow row;
      row.graph = gs.name();
      row.n = g.n();
      row.m = g.m();
      row.seed = seed;
      row.mode = spec.mode;
      row.rounds = run.metrics.rounds_elapsed;
      row.total_units = run.metrics.total_units;
      row.outcome = run.metrics.outcome;
      row.leaders = run.outcome.leaders;
      row.t_mix = t_mix;
      if (t_mix > 0) {
        row.units_norm = static_cast<double>(row.total_units) /
                         (std::sqrt(static_cast<double>(g.n())) * std::pow(log2n, 3.5) *
                          static_cast<double>(t_mix));
        row.rounds_norm = static_cast<double>(row.rounds) /
                          (static_cast<double>(t_mix) * log2n * log2n);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string experiment_csv_header() {
  return "graph,n,m,seed,mode,rounds,total_units,outcome,leaders,t_mix,units_norm,rounds_norm";
}

static std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string experiment_csv_row(const ExperimentRow& r) {
  std::ostringstream s;
  s << r.graph << ',' << r.n << ',' << r.m << ',' << r.seed << ',' << mode_name(r.mode) << ','
    << r.rounds << ',' << r.total_units << ',' << r.outcome << ',' << r.leaders << ',';
  if (r.t_mix >= 0) s << r.t_mix;
  s << ',';
  if (r.units_norm) s << fmt_double(*r.units_norm);
  s << ',';
  if (r.rounds_norm) s << fmt_double(*r.rounds_norm);
  return s.str();
}

std::string metrics_to_json(const std::string& graph_name, int n, int m, uint64_t seed, Mode mode,
                            const RunMetrics& metrics, const ElectionOutcome* outcome,
                            const BroadcastResult* broadcast) {
  json j;
  j["graph"] = graph_name;
  j["n"] = n;
  j["m"] = m;
  j["seed"] = seed;
  j["mode"] = mode_name(mode);
  j["rounds"] = metrics.rounds_elapsed;
  j["total_units"] = metrics.total_units;
  j["outcome"] = metrics.outcome;
  j["budget_exhausted"] = metrics.budget_exhausted;
  j["payloads_sent"] = metrics.payloads_sent;
  j["payloads_delivered"] = metrics.payloads_delivered;
  j["trace_hash"] = metrics.trace_hash;
  if (metrics.label_crossings > 0 || !metrics.crossing_pairs.empty()) {
    j["label_crossings"] = metrics.label_crossings;
    j["first_crossing_round"] = metrics.first_crossing_round;
    json pairs = json::array();
    for (const auto& [a, b] : metrics.crossing_pairs) pairs.push_back(json::array({a, b}));
    j["cg_edges"] = pairs;
  }
  if (outcome) {
    j["leaders"] = outcome->leaders;
    j["leader_nodes"] = outcome->leader_nodes;
    j["contenders"] = outcome->contenders;
    j["stopped"] = outcome->stopped;
    j["elected_phase"] = outcome->elected_phase;
    j["max_phase_launched"] = outcome->max_phase_launched;
    j["id_collision"] = outcome->id_collision;
    j["conservation_violations"] = outcome->conservation_violations;
    j["walk_overruns"] = outcome->walk_overruns;
    j["late_waves"] = outcome->late_waves;
  }
  if (broadcast) {
    j["broadcast_rounds"] = broadcast->rounds;
    j["all_informed"] = broadcast->all_informed;
    j["informed"] = broadcast->informed;
    j["broadcast_units"] = broadcast->metrics.total_units;
  }
  return j.dump(2);
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
  std::ostringstream s;
  for (const auto& r : trace) {
    json j;
    j["round"] = r.round;
    j["from"] = r.from;
    j["from_port"] = r.from_port;
    j["to"] = r.to;
    j["to_port"] = r.to_port;
    j["tag"] = r.tag;
    j["units"] = r.units;
    if (r.origin != 0) j["origin"] = r.origin;
    if (r.phase >= 0) j["phase"] = r.phase;
    s << j.dump() << '\n';
  }
  return s.str();
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("RWLE_OUT_DIR");
  if (!dir || !*dir) return path;
  std::string d = dir;
  if (d.back() != '/') d += '/';
  return d + path;
}

}  // namespace rwle
