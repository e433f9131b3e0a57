#include "rwle/leader.hpp"

#include <algorithm>
#include <cmath>

namespace rwle {

void ProtocolConfig::validate() const {
  if (n < 2) throw InvalidSpecError("protocol needs n >= 2");
  if (c1 <= 0) throw InvalidSpecError("c1 must be positive");
  if (c2 <= 2) throw InvalidSpecError("c2 must be > 2");
  if (initial_walk_length < 1) throw InvalidSpecError("initial walk length must be >= 1");
  if (max_phases < 1 || max_phases > 48) throw InvalidSpecError("max_phases out of range");
}

double ProtocolConfig::log2n() const { return std::log2(static_cast<double>(n)); }

double ProtocolConfig::contender_probability() const {
  return std::min(1.0, c1 * log2n() / n);
}

long ProtocolConfig::walks_per_phase() const {
  return static_cast<long>(std::ceil(c2 * std::sqrt(n * log2n())));
}

long ProtocolConfig::intersection_threshold() const {
  return static_cast<long>(std::ceil(0.75 * c1 * log2n()));
}

long ProtocolConfig::distinctness_threshold() const {
  return static_cast<long>(std::ceil(0.5 * c2 * std::sqrt(n * log2n())));
}

uint64_t ProtocolConfig::id_range() const {
  uint64_t nn = static_cast<uint64_t>(n);
  return nn * nn * nn * nn;
}

PhaseSchedule::PhaseSchedule(const ProtocolConfig& cfg)
    : c1_(cfg.c1), log2n_(cfg.log2n()), initial_(cfg.initial_walk_length),
      max_phases_(cfg.max_phases) {
  starts_.resize(max_phases_ + 1);
  starts_[0] = 0;
  for (int k = 0; k < max_phases_; ++k) starts_[k + 1] = starts_[k] + phase_length(k);
}

long PhaseSchedule::walk_len(int phase) const { return initial_ << phase; }

long PhaseSchedule::window(int phase) const {
  return static_cast<long>(std::ceil((25.0 / 16.0) * c1_ * walk_len(phase) * log2n_ * log2n_));
}

long PhaseSchedule::start(int phase) const { return starts_[phase]; }

int PhaseSchedule::phase_of_round(long round) const {
  int k = static_cast<int>(std::upper_bound(starts_.begin(), starts_.end(), round) -
                           starts_.begin()) - 1;
  if (k >= max_phases_) throw NonConvergenceError("round beyond the phase schedule");
  return k;
}

WaveFilter::Delta WaveFilter::merge(const std::vector<uint64_t>& in_ids,
                                    const std::vector<uint64_t>& in_proxy_ids, long d_delta,
                                    bool in_flag) {
  Delta delta;
  for (uint64_t x : in_ids)
    if (ids.insert(x).second) delta.ids.push_back(x);
  for (uint64_t x : in_proxy_ids)
    if (proxy_ids.insert(x).second) delta.proxy_ids.push_back(x);
  delta.d = d_delta;  // sums are forwarded as increments, never replayed
  if (in_flag && !flag) {
    flag = true;
    delta.flag = true;
  }
  return delta;
}

std::vector<long> split_walks(Rng& rng, long count, int degree) {
  std::vector<long> out(degree + 1, 0);
  for (long i = 0; i < count; ++i) {
    if (rng.next_bool())
      out[0] += 1;  // lazy stay
    else
      out[1 + rng.next_index(degree)] += 1;
  }
  return out;
}

LeaderNode::LeaderNode(int node, int degree, const ProtocolConfig* cfg,
                       const PhaseSchedule* sched, int label, Rng rng)
    : node_(node), degree_(degree), cfg_(cfg), sched_(sched), label_(label), rng_(rng) {}

void LeaderNode::start_round_zero(Context& ctx) {
  uint64_t offset = 0;
  if (!cfg_->id_offset_by_label.empty() && label_ >= 0 &&
      label_ < static_cast<int>(cfg_->id_offset_by_label.size()))
    offset = cfg_->id_offset_by_label[label_];
  id_ = offset + 1 + rng_.next_below(cfg_->id_range());
  contender_ = rng_.next_unit() < cfg_->contender_probability();
  if (!contender_) decision_ = Decision::kNonLeader;
  if (contender_) launch_walks(ctx, 0);
}

void LeaderNode::launch_walks(Context& ctx, int phase) {
  const long walks = cfg_->walks_per_phase();
  const long len = sched_->walk_len(phase);
  launched_phase_ = phase;
  launched_set_.insert(phase);
  adjacent_ids_.clear();
  proxy_ids_.clear();
  competitor_ids_.clear();
  distinct_sum_ = 0;
  spread_done_ = false;
  decided_phase_done_ = false;

  auto split = split_walks(rng_, walks, degree_);
  if (split[0] > 0) {
    long rem = len - 1;
    if (rem == 0)
      register_end(ctx, id_, phase, split[0]);
    else {
      resident_[{id_, phase, rem}] += split[0];
      ctx.wake_at(ctx.round() + 1);
    }
  }
  auto& route = routes_[{id_, phase}];
  for (int p = 1; p <= degree_; ++p) {
    if (split[p] == 0) continue;
    route.out_ports[p] += split[p];
    WalkTokenMsg msg;
    msg.origin = id_;
    msg.phase = phase;
    msg.steps.push_back({len, split[p]});
    ctx.send(p, std::move(msg));
  }
  long base = sched_->start(phase);
  long t = sched_->window(phase);
  ctx.wake_at(base + 2 * t);
  ctx.wake_at(base + 4 * t);
}

void LeaderNode::register_end(Context& ctx, uint64_t origin, int phase, long count) {
  auto& route = routes_[{origin, phase}];
  bool first = route.end_count == 0;
  route.end_count += count;
  origins_served_.insert(origin);
  if (first) {
    fresh_origins_[phase].insert(origin);
    long base = sched_->start(phase);
    long t = sched_->window(phase);
    if (ctx.round() < base + t) ctx.wake_at(base + t);
    if (ctx.round() < base + 3 * t) ctx.wake_at(base + 3 * t);
  }
}

void LeaderNode::on_token(Context& ctx, int port, const WalkTokenMsg& msg) {
  auto& route = routes_[{msg.origin, msg.phase}];
  parent_port_.try_emplace(msg.origin, port);
  long base = sched_->start(msg.phase);
  if (ctx.round() >= base + sched_->window(msg.phase)) ++walk_overruns_;
  for (const auto& step : msg.steps) {
    if (step.remaining < 1 || step.count < 1)
      throw ProtocolViolationError("walk token with non-positive remaining steps or count");
    route.in_ports[port] += step.count;
    long rem = step.remaining - 1;  // the traversal just taken was one step
    if (rem == 0) {
      register_end(ctx, msg.origin, msg.phase, step.count);
    } else {
      resident_[{msg.origin, msg.phase, rem}] += step.count;
      ctx.wake_at(ctx.round() + 1);
    }
  }
}

void LeaderNode::step_tokens(Context& ctx) {
  if (resident_.empty()) return;
  std::map<BucketKey, long> next;
  std::map<std::tuple<uint64_t, int, int>, std::vector<WalkStep>> batches;  // (origin,phase,port)
  for (const auto& [key, count] : resident_) {
    auto split = split_walks(rng_, count, degree_);
    if (split[0] > 0) {
      long rem = key.remaining - 1;
      if (rem == 0)
        register_end(ctx, key.origin, key.phase, split[0]);
      else
        next[{key.origin, key.phase, rem}] += split[0];
    }
    for (int p = 1; p <= degree_; ++p) {
      if (split[p] == 0) continue;
      routes_[{key.origin, key.phase}].out_ports[p] += split[p];
      batches[{key.origin, key.phase, p}].push_back({key.remaining, split[p]});
    }
  }
  resident_.swap(next);
  for (auto& [key, steps] : batches) {
    auto [origin, phase, port] = key;
    WalkTokenMsg msg;
    msg.origin = origin;
    msg.phase = phase;
    msg.steps = std::move(steps);
    ctx.send(port, std::move(msg));
  }
  if (!resident_.empty()) ctx.wake_at(ctx.round() + 1);
}

void LeaderNode::queue_wave(int port, WaveKind kind, int phase, uint64_t origin,
                            const WaveFilter::Delta& delta) {
  if (!delta.any()) return;
  auto& slot = pending_[{port, static_cast<int>(kind), phase, origin}];
  slot.ids.insert(slot.ids.end(), delta.ids.begin(), delta.ids.end());
  slot.proxy_ids.insert(slot.proxy_ids.end(), delta.proxy_ids.begin(), delta.proxy_ids.end());
  slot.d += delta.d;
  slot.flag = slot.flag || delta.flag;
}

void LeaderNode::flush_pending(Context& ctx) {
  for (auto& [key, delta] : pending_) {
    auto [port, kind, phase, origin] = key;
    WaveMsg msg;
    msg.kind = static_cast<WaveKind>(kind);
    msg.phase = phase;
    msg.origin = origin;
    std::sort(delta.ids.begin(), delta.ids.end());
    std::sort(delta.proxy_ids.begin(), delta.proxy_ids.end());
    msg.ids = std::move(delta.ids);
    msg.proxy_ids = std::move(delta.proxy_ids);
    msg.d_delta = delta.d;
    msg.winner_flag = delta.flag;
    ctx.send(port, std::move(msg));
  }
  pending_.clear();
}

void LeaderNode::ingest_at_origin(Context& ctx, WaveKind kind, int phase,
                                  const WaveFilter::Delta& delta, bool flag) {
  if (flag) winner_notice(ctx);
  if (phase != launched_phase_) return;  // stale wave for an earlier guess
  if (kind == WaveKind::kProxyReply) {
    adjacent_ids_.insert(delta.ids.begin(), delta.ids.end());
    adjacent_ids_.erase(id_);
    proxy_ids_.insert(delta.proxy_ids.begin(), delta.proxy_ids.end());
    distinct_sum_ += delta.d;
  } else if (kind == WaveKind::kProxyReturn) {
    competitor_ids_.insert(delta.ids.begin(), delta.ids.end());
  }
}

void LeaderNode::reverse_content(Context& ctx, WaveKind kind, int phase, uint64_t origin,
                                 const std::vector<uint64_t>& ids,
                                 const std::vector<uint64_t>& proxy_ids, long d_delta,
                                 bool flag) {
  if (origin == id_) {
    WaveFilter::Delta delta;
    delta.ids = ids;
    delta.proxy_ids = proxy_ids;
    delta.d = d_delta;
    ingest_at_origin(ctx, kind, phase, delta, flag);
    return;
  }
  auto it = parent_port_.find(origin);
  if (it == parent_port_.end()) return;  // no route: never carried this origin's walks
  auto& filter = reverse_filters_[{static_cast<int>(kind), phase, origin}];
  auto delta = filter.merge(ids, proxy_ids, d_delta, flag);
  queue_wave(it->second, kind, phase, origin, delta);
}

void LeaderNode::forward_spread(Context& ctx, int phase, uint64_t origin,
                                const std::vector<uint64_t>& ids, bool flag) {
  // ingest locally when this node is a proxy of the origin for this phase
  auto rit = routes_.find({origin, phase});
  if (rit != routes_.end() && rit->second.end_count > 0) {
    return_ids_[phase].insert(ids.begin(), ids.end());
    if (flag) winner_notice(ctx);
  }
  if (rit == routes_.end()) return;
  for (const auto& [port, count] : rit->second.out_ports) {
    (void)count;
    auto& filter = forward_filters_[{phase, origin, port}];
    auto delta = filter.merge(ids, {}, 0, flag);
    queue_wave(port, WaveKind::kOriginSpread, phase, origin, delta);
  }
}

void LeaderNode::on_wave(Context& ctx, int port, const WaveMsg& msg) {
  (void)port;
  long base = sched_->start(msg.phase);
  long t = sched_->window(msg.phase);
  int k = static_cast<int>(msg.kind);
  if (ctx.round() >= base + (k == 0 ? 2 : k == 1 ? 3 : 4) * t) ++late_waves_;
  if (msg.winner_flag) winner_notice(ctx);
  if (msg.kind == WaveKind::kOriginSpread) {
    forward_spread(ctx, msg.phase, msg.origin, msg.ids, msg.winner_flag);
  } else {
    reverse_content(ctx, msg.kind, msg.phase, msg.origin, msg.ids, msg.proxy_ids, msg.d_delta,
                    msg.winner_flag);
  }
}

void LeaderNode::send_winner_flood(Context& ctx, uint64_t origin) {
  if (!winner_fwd_done_.insert(origin).second) return;
  (void)ctx;
  std::set<int> ports;
  for (const auto& [key, route] : routes_)
    if (key.first == origin)
      for (const auto& [port, count] : route.out_ports) {
        (void)count;
        ports.insert(port);
      }
  for (int port : ports) pending_winner_.push_back({origin, false, port});
}

void LeaderNode::winner_notice(Context& ctx) {
  if (winner_seen_) return;
  winner_seen_ = true;
  // proxy duty: notify every contender served, along its reverse tree
  for (uint64_t origin : origins_served_) {
    if (origin == id_) continue;
    auto it = parent_port_.find(origin);
    if (it == parent_port_.end()) continue;
    if (winner_rev_done_.insert(origin).second)
      pending_winner_.push_back({origin, true, it->second});
  }
  // contender duty: notify own proxies and append the flag to future waves
  if (contender_) send_winner_flood(ctx, id_);
}

void LeaderNode::on_winner(Context& ctx, const WinnerMsg& msg) {
  winner_notice(ctx);
  if (msg.toward_origin) {
    if (msg.origin == id_) return;
    auto it = parent_port_.find(msg.origin);
    if (it != parent_port_.end() && winner_rev_done_.insert(msg.origin).second)
      pending_winner_.push_back({msg.origin, true, it->second});
  } else {
    if (msg.origin == id_) return;
    send_winner_flood(ctx, msg.origin);
  }
}

void LeaderNode::do_reply_round(Context& ctx, int phase) {
  if (reply_done_.count(phase)) return;
  auto fit = fresh_origins_.find(phase);
  if (fit == fresh_origins_.end() || fit->second.empty()) return;
  reply_done_.insert(phase);
  // One reply per served contender (current or earlier phases), carrying this
  // proxy's id, a distinctness bit for the current guess, and the ids of the
  // other contenders served here.
  for (uint64_t origin : origins_served_) {
    std::vector<uint64_t> others;
    for (uint64_t v : origins_served_)
      if (v != origin) others.push_back(v);
    long d = 0;
    auto rit = routes_.find({origin, phase});
    if (rit != routes_.end() && rit->second.end_count == 1) d = 1;
    bool flag = contender_ && winner_seen_;
    reverse_content(ctx, WaveKind::kProxyReply, phase, origin, others, {id_}, d, flag);
  }
}

void LeaderNode::do_spread_round(Context& ctx, int phase) {
  if (spread_done_ || launched_phase_ != phase) return;
  spread_done_ = true;
  std::vector<uint64_t> ids(adjacent_ids_.begin(), adjacent_ids_.end());
  forward_spread(ctx, phase, id_, ids, winner_seen_);
}

void LeaderNode::do_return_round(Context& ctx, int phase) {
  if (return_done_.count(phase)) return;
  auto fit = fresh_origins_.find(phase);
  if (fit == fresh_origins_.end() || fit->second.empty()) return;
  return_done_.insert(phase);
  auto iit = return_ids_.find(phase);
  static const std::set<uint64_t> kEmpty;
  const std::set<uint64_t>& pool = (iit == return_ids_.end()) ? kEmpty : iit->second;
  std::vector<uint64_t> ids(pool.begin(), pool.end());
  bool flag = contender_ && winner_seen_;
  for (uint64_t origin : fit->second)
    reverse_content(ctx, WaveKind::kProxyReturn, phase, origin, ids, {}, 0, flag);
}

void LeaderNode::do_decision(Context& ctx, int phase) {
  if (decided_phase_done_ || launched_phase_ != phase || stopped_) return;
  decided_phase_done_ = true;
  adjacent_ids_.erase(id_);
  bool stop = static_cast<long>(adjacent_ids_.size()) >= cfg_->intersection_threshold() &&
              distinct_sum_ >= cfg_->distinctness_threshold();
  if (!stop) {
    if (phase + 1 >= sched_->max_phases())
      return;  // schedule exhausted; the round budget ends the run
    ctx.wake_at(sched_->start(phase + 1));
    return;
  }
  stopped_ = true;
  stopped_phase_ = phase;
  // winner rule: strictly largest id among the returns, own id excluded
  uint64_t best_other = 0;
  for (uint64_t v : competitor_ids_)
    if (v != id_) best_other = std::max(best_other, v);
  if (!winner_seen_ && id_ > best_other) {
    decision_ = Decision::kLeader;
    elected_phase_ = phase;
    winner_seen_ = true;
    send_winner_flood(ctx, id_);
  } else {
    decision_ = Decision::kNonLeader;
  }
}

void LeaderNode::run_phase_duties(Context& ctx) {
  long r = ctx.round();
  int phase = sched_->phase_of_round(r);
  long base = sched_->start(phase);
  long t = sched_->window(phase);

  if (active_contender() && r == base && launched_phase_ < phase) launch_walks(ctx, phase);
  if (r >= base + t) do_reply_round(ctx, phase);
  if (r >= base + 2 * t && active_contender()) do_spread_round(ctx, phase);
  if (r >= base + 3 * t) do_return_round(ctx, phase);
  if (r >= base + 4 * t && active_contender()) do_decision(ctx, phase);
}

void LeaderNode::on_activate(Context& ctx) {
  if (ctx.round() == 0) start_round_zero(ctx);
  for (const auto& d : ctx.inbox()) {
    if (const auto* tok = std::get_if<WalkTokenMsg>(&d.payload))
      on_token(ctx, d.port, *tok);
    else if (const auto* wave = std::get_if<WaveMsg>(&d.payload))
      on_wave(ctx, d.port, *wave);
    else if (const auto* win = std::get_if<WinnerMsg>(&d.payload))
      on_winner(ctx, *win);
  }
  if (ctx.round() > 0) run_phase_duties(ctx);
  step_tokens(ctx);
  for (const auto& w : pending_winner_) {
    WinnerMsg msg;
    msg.origin = w.origin;
    msg.toward_origin = w.toward_origin;
    ctx.send(w.port, msg);
  }
  pending_winner_.clear();
  flush_pending(ctx);
}

long LeaderNode::resident_count(uint64_t origin, int phase) const {
  long sum = 0;
  for (const auto& [key, count] : resident_)
    if (key.origin == origin && key.phase == phase) sum += count;
  return sum;
}

long LeaderNode::end_count(uint64_t origin, int phase) const {
  auto it = routes_.find({origin, phase});
  return it == routes_.end() ? 0 : it->second.end_count;
}

ProtocolFactory make_leader_factory(const Graph& g, const ProtocolConfig* cfg,
                                    const PhaseSchedule* sched) {
  return [&g, cfg, sched](int node, int degree, int n, Rng rng) -> std::unique_ptr<Protocol> {
    (void)n;
    return std::make_unique<LeaderNode>(node, degree, cfg, sched, g.label(node), rng);
  };
}

ElectionRun run_leader_election(const Graph& g, const ProtocolConfig& cfg, SimConfig sim_cfg,
                                bool audit) {
  cfg.validate();
  PhaseSchedule sched(cfg);
  Simulator sim(g, make_leader_factory(g, &cfg, &sched), sim_cfg);

  ElectionRun out;
  int next_audit_phase = 0;
  auto hook = [&](Simulator& s, long round) {
    if (!audit) return;
    while (next_audit_phase < sched.max_phases() &&
           round >= sched.start(next_audit_phase) + sched.window(next_audit_phase)) {
      int k = next_audit_phase++;
      // token conservation at the walk-window boundary of phase k
      std::map<uint64_t, long> tally;
      for (int u = 0; u < g.n(); ++u) {
        const auto& node = dynamic_cast<const LeaderNode&>(s.protocol(u));
        if (node.contender() && node.launched(k)) tally[node.id()] = 0;
      }
      if (tally.empty()) continue;
      for (int u = 0; u < g.n(); ++u) {
        const auto& node = dynamic_cast<const LeaderNode&>(s.protocol(u));
        for (auto& [origin, sum] : tally)
          sum += node.resident_count(origin, k) + node.end_count(origin, k);
      }
      auto add_payload = [&](const Payload& p) {
        const auto* tok = std::get_if<WalkTokenMsg>(&p);
        if (!tok || tok->phase != k) return;
        auto it = tally.find(tok->origin);
        if (it == tally.end()) return;
        for (const auto& step : tok->steps) it->second += step.count;
      };
      s.for_each_queued([&](int, int, const Payload& p) { add_payload(p); });
      s.for_each_inflight(add_payload);
      for (const auto& [origin, sum] : tally)
        if (sum != cfg.walks_per_phase()) out.outcome.conservation_violations += 1;
    }
  };

  out.metrics = sim.run(hook);
  out.outcome.budget_exhausted = out.metrics.budget_exhausted;

  std::map<uint64_t, int> id_count;
  for (int u = 0; u < g.n(); ++u) {
    const auto& node = dynamic_cast<const LeaderNode&>(sim.protocol(u));
    id_count[node.id()] += 1;
    if (node.contender()) {
      out.outcome.contenders += 1;
      out.outcome.max_phase_launched =
          std::max(out.outcome.max_phase_launched, node.last_launched_phase());
      if (node.stopped()) out.outcome.stopped += 1;
    }
    if (node.decision() == LeaderNode::Decision::kLeader) {
      out.outcome.leaders += 1;
      out.outcome.leader_nodes.push_back(u);
      out.outcome.leader_ids.push_back(node.id());
      if (out.outcome.elected_phase < 0 || node.elected_phase() < out.outcome.elected_phase)
        out.outcome.elected_phase = node.elected_phase();
    }
    out.outcome.walk_overruns += node.walk_overruns();
    out.outcome.late_waves += node.late_waves();
  }
  for (const auto& [id, count] : id_count)
    if (count > 1) out.outcome.id_collision = true;

  out.metrics.outcome = out.outcome.leaders == 1   ? "elected"
                        : out.outcome.leaders == 0 ? (out.outcome.budget_exhausted
                                                          ? "no_leader_budget"
                                                          : "no_leader")
                                                   : "multi_leader";
  if (sim_cfg.record_trace) out.trace = sim.trace();
  return out;
}

}  // namespace rwle
