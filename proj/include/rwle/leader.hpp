#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "rwle/sim.hpp"

namespace rwle {

struct ProtocolConfig {
  double c1 = 2.0;
  double c2 = 3.0;
  long initial_walk_length = 1;
  int n = 0;  // network size as known to the nodes (experiments may misreport it)
  // Optional id-space shift per node label, for runs that need disjoint id
  // ranges across graph parts. Empty = no shift.
  std::vector<uint64_t> id_offset_by_label;
  int max_phases = 40;

  void validate() const;

  double log2n() const;
  double contender_probability() const;  // min(1, c1 log2(n) / n)
  long walks_per_phase() const;          // ceil(c2 sqrt(n log2 n))
  long intersection_threshold() const;   // ceil((3/4) c1 log2 n)
  long distinctness_threshold() const;   // ceil((c2/2) sqrt(n log2 n))
  uint64_t id_range() const;             // n^4
};

// Global phase layout, computable by every node from (n, cfg) alone.
// Phase k runs walks of length t_k = initial * 2^k inside a congestion
// window T_k = ceil((25/16) c1 t_k log2(n)^2); the exchange windows and the
// winner-propagation wait stack up to a phase of length 6 T_k.
class PhaseSchedule {
 public:
  PhaseSchedule() = default;
  PhaseSchedule(const ProtocolConfig& cfg);

  long walk_len(int phase) const;
  long window(int phase) const;                     // T
  long phase_length(int phase) const { return 6 * window(phase); }
  long start(int phase) const;
  int phase_of_round(long round) const;
  int max_phases() const { return max_phases_; }

 private:
  double c1_ = 0, log2n_ = 0;
  long initial_ = 1;
  int max_phases_ = 0;
  std::vector<long> starts_;  // prefix sums, length max_phases_+1
};

// Merging filter for wave content relayed along walk routes: remembers what
// has already been seen/forwarded and returns only the novel part, so ids
// are unioned and distinctness counts are summed exactly once.
struct WaveFilter {
  std::set<uint64_t> ids;
  std::set<uint64_t> proxy_ids;
  bool flag = false;

  struct Delta {
    std::vector<uint64_t> ids, proxy_ids;
    long d = 0;
    bool flag = false;
    bool any() const { return d != 0 || flag || !ids.empty() || !proxy_ids.empty(); }
  };
  Delta merge(const std::vector<uint64_t>& in_ids, const std::vector<uint64_t>& in_proxy_ids,
              long d_delta, bool in_flag);
};

// Lazy multinomial split of an aggregated token bundle: each of `count`
// walks independently stays put (probability 1/2) or leaves through a
// uniform port. Returned vector is indexed stay=0, port p at index p.
std::vector<long> split_walks(Rng& rng, long count, int degree);

class LeaderNode : public Protocol {
 public:
  LeaderNode(int node, int degree, const ProtocolConfig* cfg, const PhaseSchedule* sched,
             int label, Rng rng);

  void on_activate(Context& ctx) override;
  bool done() const override { return decision_ != Decision::kUndecided; }

  enum class Decision { kUndecided, kLeader, kNonLeader };

  // inspection (metrics, audits, tests)
  uint64_t id() const { return id_; }
  bool contender() const { return contender_; }
  Decision decision() const { return decision_; }
  bool stopped() const { return stopped_; }
  bool winner_seen() const { return winner_seen_; }
  int elected_phase() const { return elected_phase_; }
  int stopped_phase() const { return stopped_phase_; }
  int last_launched_phase() const { return launched_phase_; }
  bool launched(int phase) const { return launched_set_.count(phase) > 0; }
  long adjacent_count() const { return static_cast<long>(adjacent_ids_.size()); }
  long distinct_sum() const { return distinct_sum_; }
  long walk_overruns() const { return walk_overruns_; }
  long late_waves() const { return late_waves_; }
  // resident walk mass for a given origin/phase (token-conservation audit)
  long resident_count(uint64_t origin, int phase) const;
  long end_count(uint64_t origin, int phase) const;

 private:
  struct Route {
    std::map<int, long> in_ports;
    std::map<int, long> out_ports;
    long end_count = 0;
  };
  struct BucketKey {
    uint64_t origin;
    int phase;
    long remaining;
    auto operator<=>(const BucketKey&) const = default;
  };

  bool active_contender() const { return contender_ && !stopped_; }

  void start_round_zero(Context& ctx);
  void launch_walks(Context& ctx, int phase);
  void step_tokens(Context& ctx);
  void on_token(Context& ctx, int port, const WalkTokenMsg& msg);
  void on_wave(Context& ctx, int port, const WaveMsg& msg);
  void on_winner(Context& ctx, const WinnerMsg& msg);
  void winner_notice(Context& ctx);
  void run_phase_duties(Context& ctx);
  void do_reply_round(Context& ctx, int phase);    // R1, proxies
  void do_spread_round(Context& ctx, int phase);   // R2, contender
  void do_return_round(Context& ctx, int phase);   // R3, proxies
  void do_decision(Context& ctx, int phase);
  void register_end(Context& ctx, uint64_t origin, int phase, long count);

  // wave plumbing
  void reverse_content(Context& ctx, WaveKind kind, int phase, uint64_t origin,
                       const std::vector<uint64_t>& ids, const std::vector<uint64_t>& proxy_ids,
                       long d_delta, bool flag);
  void forward_spread(Context& ctx, int phase, uint64_t origin, const std::vector<uint64_t>& ids,
                      bool flag);
  void ingest_at_origin(Context& ctx, WaveKind kind, int phase, const WaveFilter::Delta& delta,
                        bool flag);
  void queue_wave(int port, WaveKind kind, int phase, uint64_t origin,
                  const WaveFilter::Delta& delta);
  void flush_pending(Context& ctx);
  void send_winner_flood(Context& ctx, uint64_t origin);

  int node_;
  int degree_;
  const ProtocolConfig* cfg_;
  const PhaseSchedule* sched_;
  int label_;
  Rng rng_;

  uint64_t id_ = 0;
  bool contender_ = false;
  Decision decision_ = Decision::kUndecided;
  bool stopped_ = false;
  bool winner_seen_ = false;
  int elected_phase_ = -1;
  int stopped_phase_ = -1;

  // contender per-phase state
  int launched_phase_ = -1;
  std::set<int> launched_set_;
  std::set<uint64_t> adjacent_ids_;    // union of co-served contender ids (round 1)
  std::set<uint64_t> proxy_ids_;       // ids of proxies that replied
  long distinct_sum_ = 0;              // distinctness contributions (round 1)
  std::set<uint64_t> competitor_ids_;  // union of proxy returns (round 3)
  bool spread_done_ = false, decided_phase_done_ = false;

  // walking / routing
  std::map<BucketKey, long> resident_;
  std::map<std::pair<uint64_t, int>, Route> routes_;
  std::map<uint64_t, int> parent_port_;  // origin -> port of first token arrival
  std::set<uint64_t> origins_served_;    // origins proxied for, any phase
  std::map<int, std::set<uint64_t>> fresh_origins_;  // phase -> origins ended here
  std::set<int> reply_done_, return_done_;           // phases with R1/R3 duty done
  std::map<int, std::set<uint64_t>> return_ids_;     // phase -> union of spread sets received

  // relay state: (kind, phase, origin) -> filter toward the parent port;
  // for the forward flood additionally one filter per out port
  std::map<std::tuple<int, int, uint64_t>, WaveFilter> reverse_filters_;
  std::map<std::tuple<int, uint64_t, int>, WaveFilter> forward_filters_;  // (phase, origin, port)

  std::set<uint64_t> winner_fwd_done_, winner_rev_done_;
  struct PendingWinner {
    uint64_t origin;
    bool toward_origin;
    int port;
  };
  std::vector<PendingWinner> pending_winner_;

  // pending outgoing waves, merged per (port, kind, phase, origin)
  std::map<std::tuple<int, int, int, uint64_t>, WaveFilter::Delta> pending_;

  long walk_overruns_ = 0;
  long late_waves_ = 0;
};

struct ElectionOutcome {
  int leaders = 0;
  std::vector<int> leader_nodes;
  std::vector<uint64_t> leader_ids;
  int contenders = 0;
  int stopped = 0;
  int elected_phase = -1;
  int max_phase_launched = -1;
  bool budget_exhausted = false;
  bool id_collision = false;
  long conservation_violations = 0;
  long walk_overruns = 0;
  long late_waves = 0;
};

struct ElectionRun {
  RunMetrics metrics;
  ElectionOutcome outcome;
  std::vector<TraceRecord> trace;  // populated when sim_cfg.record_trace is set
};

ProtocolFactory make_leader_factory(const Graph& g, const ProtocolConfig* cfg,
                                    const PhaseSchedule* sched);

// Full protocol on the round engine. With audit enabled the run checks token
// conservation at every walk-window boundary (walks in flight + walks ended
// must equal the launched bundle size, exactly).
ElectionRun run_leader_election(const Graph& g, const ProtocolConfig& cfg, SimConfig sim_cfg,
                                bool audit = true);

}  // namespace rwle
