#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rwle/graph.hpp"
#include "rwle/payload.hpp"

namespace rwle {

struct TraceRecord {
  long round = 0;  // transmission round; the payload lands at round+1
  int from = 0, from_port = 0, to = 0, to_port = 0;
  std::string tag;
  long units = 1;
  bool final_unit = true;   // last fragment of its payload
  uint64_t origin = 0;      // walk-route origin for protocol payloads, else 0
  int phase = -1;
};

uint64_t payload_origin(const Payload& p);
int payload_phase(const Payload& p);

struct SimConfig {
  uint64_t seed = 1;
  Mode mode = Mode::kCongest;
  long round_budget = 5'000'000;
  bool record_trace = false;
  // Per-node randomness stream keys; empty = node index. Used by experiments
  // that replay one subgraph's behavior inside a larger graph.
  std::vector<uint64_t> stream_salts;
  // CONGEST word size override; 0 derives B from the graph size. Experiments
  // that misreport n to the nodes set this to the believed word size.
  int b_bits = 0;
};

struct RunMetrics {
  long total_units = 0;
  std::vector<std::pair<long, long>> per_round_units;  // sparse (round, units)
  long rounds_elapsed = 0;
  bool budget_exhausted = false;
  std::string outcome;
  uint64_t trace_hash = 0;

  long payloads_sent = 0;
  long payloads_delivered = 0;
  long delivered_units = 0;  // accumulated independently at delivery time
  long inflight_units = 0;   // undelivered at stop (budget exhaustion only)

  // Label-crossing bookkeeping, populated when the graph carries labels
  // (clique ids of the lower-bound family, dumbbell halves).
  long label_crossings = 0;
  long first_crossing_round = -1;
  std::vector<std::pair<int, int>> crossing_pairs;  // distinct, sorted
};

struct Delivery {
  int port = 0;  // receiving port
  Payload payload;
};

class Simulator;

class Context {
 public:
  long round() const { return round_; }
  int node() const { return node_; }
  int degree() const;
  std::span<const Delivery> inbox() const { return inbox_; }

  // Queued send: the payload is accounted into units and leaves through this
  // port one unit per round, FIFO. Congestion is thereby physical.
  void send(int port, Payload payload);

  // Model-level send: one whole message on this port this round. Throws
  // ProtocolViolationError for a second message on the same port in the same
  // round, or for a payload wider than one word.
  void send_raw(int port, Payload payload);

  void wake_at(long round);

 private:
  friend class Simulator;
  Context(Simulator* sim, int node, long round, std::span<const Delivery> inbox)
      : sim_(sim), node_(node), round_(round), inbox_(inbox) {}
  Simulator* sim_;
  int node_;
  long round_;
  std::span<const Delivery> inbox_;
};

// Per-node state machine. All nodes are activated at round 0 (simultaneous
// wake-up); afterwards a node runs only in rounds where it received messages
// or scheduled a wakeup.
class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual void on_activate(Context& ctx) = 0;
  virtual bool done() const { return true; }
};

using ProtocolFactory =
    std::function<std::unique_ptr<Protocol>(int node, int degree, int n, Rng rng)>;

// Deterministic synchronous round engine with per-port FIFO queues and
// message-unit accounting. Rounds with no deliveries, queued traffic or
// wakeups are skipped wholesale.
class Simulator {
 public:
  Simulator(const Graph& g, const ProtocolFactory& factory, SimConfig cfg);

  using RoundHook = std::function<void(Simulator&, long round)>;

  RunMetrics& run(const RoundHook& hook = {});

  // Omniscient stop condition, checked after each round's deliveries.
  void set_stop_predicate(std::function<bool(const Simulator&)> pred) {
    stop_predicate_ = std::move(pred);
  }

  const Graph& graph() const { return *g_; }
  int b_bits() const { return b_bits_; }
  Mode mode() const { return cfg_.mode; }
  Protocol& protocol(int node) { return *nodes_[node]; }
  const Protocol& protocol(int node) const { return *nodes_[node]; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  RunMetrics& metrics() { return metrics_; }
  const RunMetrics& metrics() const { return metrics_; }

  // Payloads still sitting in port queues / awaiting delivery (audits).
  void for_each_queued(const std::function<void(int node, int port, const Payload&)>& f) const;
  void for_each_inflight(const std::function<void(const Payload&)>& f) const;

 private:
  friend class Context;

  struct QueuedPayload {
    Payload payload;
    long units_total = 1;
    long units_left = 1;
  };
  struct PendingDelivery {
    int to = 0, to_port = 0, from = 0, from_port = 0;
    Payload payload;
  };

  void enqueue(int node, int port, Payload payload);
  void emit_raw(int node, int port, Payload payload);
  void transmit_unit(int node, int port, const Payload& payload, long units_total,
                     bool final_unit);
  void record_hash(const TraceRecord& rec);

  const Graph* g_;
  SimConfig cfg_;
  int b_bits_ = 1;
  std::vector<std::unique_ptr<Protocol>> nodes_;

  std::vector<std::vector<std::deque<QueuedPayload>>> queues_;  // [node][port-1]
  std::set<std::pair<int, int>> busy_ports_;
  std::vector<PendingDelivery> pending_;  // deliveries for the next round
  std::set<std::pair<int, int>> raw_sent_;  // (node, port) raw sends this round
  std::priority_queue<std::pair<long, int>, std::vector<std::pair<long, int>>,
                      std::greater<>> wakeups_;
  std::function<bool(const Simulator&)> stop_predicate_;

  std::vector<TraceRecord> trace_;
  RunMetrics metrics_;
  std::set<std::pair<int, int>> crossing_pairs_;
  long round_units_ = 0;
  long current_round_ = 0;
  bool ran_ = false;
};

}  // namespace rwle
