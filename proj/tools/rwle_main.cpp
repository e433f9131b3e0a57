#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rwle/analysis.hpp"
#include "rwle/broadcast.hpp"
#include "rwle/experiment.hpp"
#include "rwle/generators.hpp"
#include "rwle/lowerbound.hpp"

using namespace rwle;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::string resolved = resolve_output_path(path);
  std::ofstream out(resolved);
  if (!out) throw Error("cannot open " + resolved + " for writing");
  out << content;
}

int cmd_generate(const GraphSpec& spec, const std::string& base_file, const std::string& out) {
  Graph g;
  if (spec.family == "dumbbell") {
    if (base_file.empty()) throw InvalidSpecError("dumbbell generation needs --base <graph file>");
    Graph g0 = Graph::load(base_file);
    g = generate_dumbbell(g0, spec.seed).graph;
  } else {
    if (spec.family == "lower-bound")
      for (const auto& w : LowerBoundSpec{spec.n, spec.alpha}.validate())
        std::cerr << "warning: " << w << '\n';
    g = build_graph(spec);
  }
  write_file(out, g.serialize());
  std::cout << "wrote " << g.n() << " nodes, " << g.m() << " edges to "
            << resolve_output_path(out) << '\n';
  return 0;
}

int cmd_run(const std::string& graph_file, uint64_t seed, Mode mode, double c1, double c2,
            long initial_len, long budget, bool explicit_broadcast, const std::string& json_out,
            const std::string& csv_out, const std::string& trace_out) {
  Graph g = Graph::load(graph_file);
  ProtocolConfig cfg;
  cfg.c1 = c1;
  cfg.c2 = c2;
  cfg.initial_walk_length = initial_len;
  cfg.n = g.n();
  SimConfig sc;
  sc.seed = seed;
  sc.mode = mode;
  sc.round_budget = budget;
  sc.record_trace = !trace_out.empty();
  ElectionRun run = run_leader_election(g, cfg, sc);

  BroadcastResult broadcast;
  bool have_broadcast = false;
  if (explicit_broadcast && run.outcome.leaders == 1) {
    SimConfig bc;
    bc.seed = seed ^ 0x62636173ULL;
    bc.mode = mode;
    bc.round_budget = budget;
    broadcast =
        push_pull_broadcast(g, run.outcome.leader_nodes[0], run.outcome.leader_ids[0], bc);
    have_broadcast = true;
  }

  std::string json = metrics_to_json(graph_file, g.n(), g.m(), seed, mode, run.metrics,
                                     &run.outcome, have_broadcast ? &broadcast : nullptr);
  if (json_out.empty())
    std::cout << json << '\n';
  else
    write_file(json_out, json + "\n");
  if (!csv_out.empty()) {
    ExperimentRow row;
    row.graph = graph_file;
    row.n = g.n();
    row.m = g.m();
    row.seed = seed;
    row.mode = mode;
    row.rounds = run.metrics.rounds_elapsed;
    row.total_units = run.metrics.total_units;
    row.outcome = run.metrics.outcome;
    row.leaders = run.outcome.leaders;
    write_file(csv_out, experiment_csv_header() + "\n" + experiment_csv_row(row) + "\n");
  }
  if (!trace_out.empty()) write_file(trace_out, trace_to_jsonl(run.trace));
  return 0;
}

int cmd_experiment(const std::string& spec_file, const std::string& out_csv) {
  std::ifstream in(spec_file);
  if (!in) throw Error("cannot open " + spec_file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentSpec spec = ExperimentSpec::from_json_text(buffer.str());
  if (!out_csv.empty()) spec.out_csv = out_csv;

  auto rows = run_experiment(spec);
  std::ostringstream csv;
  csv << experiment_csv_header() << '\n';
  for (const auto& row : rows) csv << experiment_csv_row(row) << '\n';
  if (spec.out_csv.empty())
    std::cout << csv.str();
  else
    write_file(spec.out_csv, csv.str());
  return 0;
}

int cmd_analyze(const std::string& graph_file, double c_lo, double c_hi) {
  Graph g = Graph::load(graph_file);
  std::ostringstream out;
  out << "{\n  \"graph\": \"" << graph_file << "\",\n  \"n\": " << g.n()
      << ",\n  \"m\": " << g.m() << ",\n";
  if (g.n() <= 24) {
    CutResult cut = conductance_exact(g);
    out << "  \"phi_exact\": " << cut.phi() << ",\n  \"phi_rational\": \"" << cut.phi_num << "/"
        << cut.phi_den << "\",\n";
  }
  SpectralBounds sb = conductance_spectral_bounds(g);
  out << "  \"phi_lower\": " << sb.lower << ",\n  \"phi_upper\": " << sb.upper << ",\n";
  SandwichReport rep = check_phimix_sandwich(g, c_lo, c_hi);
  out << "  \"t_mix\": " << rep.t_mix << ",\n  \"sandwich_c_lo\": " << c_lo
      << ",\n  \"sandwich_c_hi\": " << c_hi << ",\n  \"sandwich_pass\": "
      << (rep.pass ? "true" : "false") << "\n}";
  std::cout << out.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-walk leader election simulator (CONGEST rounds)"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a graph file");
  GraphSpec gspec;
  std::string base_file, gen_out = "graph.txt";
  gen->add_option("--family", gspec.family,
                  "clique | hypercube | ring | random-regular | lower-bound | dumbbell")
      ->required();
  gen->add_option("--n", gspec.n, "node count");
  gen->add_option("--d", gspec.d, "degree / hypercube dimension");
  gen->add_option("--alpha", gspec.alpha, "conductance parameter of the lower-bound family");
  gen->add_option("--seed", gspec.seed, "generator seed");
  gen->add_option("--base", base_file, "base graph file for dumbbell");
  gen->add_option("--out", gen_out, "output graph file");

  // run
  auto* run = app.add_subcommand("run", "single leader-election run");
  std::string run_graph, run_mode = "congest", run_json, run_csv, run_trace;
  uint64_t run_seed = 1;
  double c1 = 2.0, c2 = 3.0;
  long initial_len = 1, budget = 5'000'000;
  bool explicit_broadcast = false;
  run->add_option("--graph", run_graph, "graph file")->required();
  run->add_option("--seed", run_seed, "run seed");
  run->add_option("--mode", run_mode, "congest | relaxed");
  run->add_option("--c1", c1, "contender-probability constant");
  run->add_option("--c2", c2, "walks-per-phase constant (> 2)");
  run->add_option("--initial-len", initial_len, "initial walk length");
  run->add_option("--budget", budget, "round budget");
  run->add_flag("--explicit", explicit_broadcast, "chain push-pull broadcast after election");
  run->add_option("--json", run_json, "metrics JSON output file (default stdout)");
  run->add_option("--csv", run_csv, "metrics CSV output file");
  run->add_option("--trace", run_trace, "trace JSONL output file");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run an experiment spec (JSON)");
  std::string spec_file, exp_csv;
  exp->add_option("--spec", spec_file, "experiment spec JSON file")->required();
  exp->add_option("--out", exp_csv, "CSV output file (default stdout or spec's out_csv)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "conductance / mixing-time report for a graph");
  std::string ana_graph;
  double c_lo = 0.05, c_hi = 100.0;
  ana->add_option("--graph", ana_graph, "graph file")->required();
  ana->add_option("--clo", c_lo, "sandwich lower constant");
  ana->add_option("--chi", c_hi, "sandwich upper constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gspec, base_file, gen_out);
    if (run->parsed())
      return cmd_run(run_graph, run_seed, mode_from_name(run_mode), c1, c2, initial_len, budget,
                     explicit_broadcast, run_json, run_csv, run_trace);
    if (exp->parsed()) return cmd_experiment(spec_file, exp_csv);
    if (ana->parsed()) return cmd_analyze(ana_graph, c_lo, c_hi);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
