#include "rwle/sim.hpp"

#include <algorithm>

namespace rwle {

uint64_t payload_origin(const Payload& p) {
  if (const auto* t = std::get_if<WalkTokenMsg>(&p)) return t->origin;
  if (const auto* w = std::get_if<WaveMsg>(&p)) return w->origin;
  if (const auto* m = std::get_if<WinnerMsg>(&p)) return m->origin;
  return 0;
}

int payload_phase(const Payload& p) {
  if (const auto* t = std::get_if<WalkTokenMsg>(&p)) return t->phase;
  if (const auto* w = std::get_if<WaveMsg>(&p)) return w->phase;
  return -1;
}

int Context::degree() const { return sim_->graph().degree(node_); }

void Context::send(int port, Payload payload) { sim_->enqueue(node_, port, std::move(payload)); }

void Context::send_raw(int port, Payload payload) { sim_->emit_raw(node_, port, std::move(payload)); }

void Context::wake_at(long round) {
  if (round <= round_) throw ProtocolViolationError("wakeup must be in the future");
  sim_->wakeups_.push({round, node_});
}

Simulator::Simulator(const Graph& g, const ProtocolFactory& factory, SimConfig cfg)
    : g_(&g), cfg_(std::move(cfg)) {
  if (cfg_.round_budget < 1) throw InvalidSpecError("round_budget must be >= 1");
  if (!cfg_.stream_salts.empty() && static_cast<int>(cfg_.stream_salts.size()) != g.n())
    throw InvalidSpecError("stream_salts size mismatch");
  b_bits_ = cfg_.b_bits > 0 ? cfg_.b_bits : word_bits(g.n());
  nodes_.reserve(g.n());
  queues_.resize(g.n());
  for (int u = 0; u < g.n(); ++u) {
    queues_[u].resize(g.degree(u));
    uint64_t salt = cfg_.stream_salts.empty() ? static_cast<uint64_t>(u) : cfg_.stream_salts[u];
    nodes_.push_back(factory(u, g.degree(u), g.n(), derive_stream(cfg_.seed, salt)));
  }
}

void Simulator::record_hash(const TraceRecord& rec) {
  auto fnv = [](uint64_t h, uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
    return h;
  };
  uint64_t h = metrics_.trace_hash ? metrics_.trace_hash : 0xcbf29ce484222325ULL;
  h = fnv(h, static_cast<uint64_t>(rec.round));
  h = fnv(h, (static_cast<uint64_t>(rec.from) << 32) | static_cast<uint64_t>(rec.from_port));
  h = fnv(h, (static_cast<uint64_t>(rec.to) << 32) | static_cast<uint64_t>(rec.to_port));
  for (char c : rec.tag) h = fnv(h, static_cast<uint64_t>(static_cast<unsigned char>(c)));
  h = fnv(h, static_cast<uint64_t>(rec.units));
  h = fnv(h, rec.origin);
  metrics_.trace_hash = h;
}

void Simulator::transmit_unit(int node, int port, const Payload& payload, long units_total,
                              bool final_unit) {
  PortTarget t = g_->peer(node, port);
  TraceRecord rec;
  rec.round = current_round_;
  rec.from = node;
  rec.from_port = port;
  rec.to = t.node;
  rec.to_port = t.port;
  rec.tag = payload_tag(payload);
  rec.units = 1;
  rec.final_unit = final_unit;
  rec.origin = payload_origin(payload);
  rec.phase = payload_phase(payload);
  record_hash(rec);
  if (cfg_.record_trace) trace_.push_back(rec);
  metrics_.total_units += 1;
  round_units_ += 1;
  if (g_->labeled() && g_->label(node) != g_->label(t.node)) {
    metrics_.label_crossings += 1;
    if (metrics_.first_crossing_round < 0) metrics_.first_crossing_round = current_round_;
    crossing_pairs_.insert(std::minmax(g_->label(node), g_->label(t.node)));
  }
  if (final_unit) {
    PendingDelivery d;
    d.to = t.node;
    d.to_port = t.port;
    d.from = node;
    d.from_port = port;
    d.payload = payload;
    metrics_.delivered_units += units_total;
    pending_.push_back(std::move(d));
  }
}

void Simulator::enqueue(int node, int port, Payload payload) {
  if (port < 1 || port > g_->degree(node)) throw ProtocolViolationError("port out of range");
  long units = account_payload_b(payload_bits(payload, b_bits_), cfg_.mode, b_bits_);
  queues_[node][port - 1].push_back({std::move(payload), units, units});
  busy_ports_.insert({node, port});
  metrics_.payloads_sent += 1;
}

void Simulator::emit_raw(int node, int port, Payload payload) {
  if (port < 1 || port > g_->degree(node)) throw ProtocolViolationError("port out of range");
  long units = account_payload_b(payload_bits(payload, b_bits_), cfg_.mode, b_bits_);
  if (units != 1)
    throw ProtocolViolationError("raw send wider than one word in " +
                                 std::string(cfg_.mode == Mode::kCongest ? "CONGEST" : "RELAXED") +
                                 " mode");
  if (!raw_sent_.insert({node, port}).second)
    throw ProtocolViolationError("node " + std::to_string(node) + " emitted two envelopes on port " +
                                 std::to_string(port) + " in round " + std::to_string(current_round_));
  if (busy_ports_.count({node, port}))
    throw ProtocolViolationError("raw send on a port with queued backlog");
  metrics_.payloads_sent += 1;
  transmit_unit(node, port, payload, units, true);
}

RunMetrics& Simulator::run(const RoundHook& hook) {
  if (ran_) throw Error("Simulator::run may only be called once");
  ran_ = true;

  for (int u = 0; u < g_->n(); ++u) wakeups_.push({0, u});

  std::vector<PendingDelivery> arriving;
  std::vector<Delivery> inboxes;      // flat, grouped by node
  std::vector<std::pair<int, int>> inbox_spans;  // (node, start index)
  long last_activity = 0;

  while (true) {
    // Next round with any work: queued traffic and fresh deliveries keep
    // consecutive rounds active, otherwise jump to the earliest wakeup.
    long next = -1;
    if (!pending_.empty() || !busy_ports_.empty()) next = current_round_ + 1;
    if (!wakeups_.empty()) {
      long w = wakeups_.top().first;
      next = (next < 0) ? w : std::min(next, w);
    }
    if (next < 0) break;  // quiescent
    if (next > cfg_.round_budget) {
      metrics_.budget_exhausted = true;
      break;
    }
    current_round_ = next;

    // 1. deliveries scheduled for this round
    arriving.clear();
    arriving.swap(pending_);
    std::stable_sort(arriving.begin(), arriving.end(),
                     [](const PendingDelivery& a, const PendingDelivery& b) {
                       return std::tie(a.to, a.from, a.from_port) <
                              std::tie(b.to, b.from, b.from_port);
                     });
    inboxes.clear();
    inbox_spans.clear();
    for (auto& d : arriving) {
      if (inbox_spans.empty() || inbox_spans.back().first != d.to)
        inbox_spans.push_back({d.to, static_cast<int>(inboxes.size())});
      inboxes.push_back({d.to_port, std::move(d.payload)});
    }
    metrics_.payloads_delivered += static_cast<long>(arriving.size());

    // 2. activation set: deliveries plus due wakeups
    std::vector<int> active;
    for (const auto& [node, start] : inbox_spans) active.push_back(node);
    while (!wakeups_.empty() && wakeups_.top().first <= current_round_) {
      active.push_back(wakeups_.top().second);
      wakeups_.pop();
    }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());

    // 3. run protocols
    raw_sent_.clear();
    round_units_ = 0;
    size_t span_idx = 0;
    for (int node : active) {
      while (span_idx < inbox_spans.size() && inbox_spans[span_idx].first < node) ++span_idx;
      std::span<const Delivery> inbox;
      if (span_idx < inbox_spans.size() && inbox_spans[span_idx].first == node) {
        int start = inbox_spans[span_idx].second;
        int end = (span_idx + 1 < inbox_spans.size()) ? inbox_spans[span_idx + 1].second
                                                      : static_cast<int>(inboxes.size());
        inbox = std::span<const Delivery>(inboxes.data() + start, end - start);
      }
      Context ctx(this, node, current_round_, inbox);
      nodes_[node]->on_activate(ctx);
    }

    // 4. drain queues: one unit per busy port
    std::vector<std::pair<int, int>> ports(busy_ports_.begin(), busy_ports_.end());
    for (const auto& [node, port] : ports) {
      if (raw_sent_.count({node, port}))
        throw ProtocolViolationError("raw send on a port with queued backlog");
      auto& q = queues_[node][port - 1];
      auto& front = q.front();
      front.units_left -= 1;
      bool final_unit = front.units_left == 0;
      transmit_unit(node, port, front.payload, front.units_total, final_unit);
      if (final_unit) {
        q.pop_front();
        if (q.empty()) busy_ports_.erase({node, port});
      }
    }

    if (round_units_ > 0) metrics_.per_round_units.push_back({current_round_, round_units_});
    if (!active.empty() || !arriving.empty() || round_units_ > 0) last_activity = current_round_;

    if (hook) hook(*this, current_round_);
    if (stop_predicate_ && stop_predicate_(*this)) break;
  }

  metrics_.rounds_elapsed = last_activity;
  // units already on the wire but not yet part of a completed payload, so
  // that total_units == delivered_units + inflight_units always holds
  for (const auto& nq : queues_)
    for (const auto& q : nq)
      for (const auto& item : q) metrics_.inflight_units += item.units_total - item.units_left;
  metrics_.crossing_pairs.assign(crossing_pairs_.begin(), crossing_pairs_.end());
  return metrics_;
}

void Simulator::for_each_queued(
    const std::function<void(int node, int port, const Payload&)>& f) const {
  for (int u = 0; u < g_->n(); ++u)
    for (int p = 1; p <= g_->degree(u); ++p)
      for (const auto& item : queues_[u][p - 1]) f(u, p, item.payload);
}

void Simulator::for_each_inflight(const std::function<void(const Payload&)>& f) const {
  for (const auto& d : pending_) f(d.payload);
}

}  // namespace rwle
