#include "rwle/broadcast.hpp"

#include <algorithm>

namespace rwle {

namespace {

class RumorNode : public Protocol {
 public:
  RumorNode(int degree, bool informed, uint64_t rumor, Rng rng)
      : degree_(degree), informed_(informed), rumor_(informed ? rumor : 0), rng_(rng) {}

  void on_activate(Context& ctx) override {
    for (const auto& d : ctx.inbox()) {
      if (const auto* r = std::get_if<RumorMsg>(&d.payload)) {
        if (!informed_) {
          informed_ = true;
          rumor_ = r->leader_id;
          informed_round_ = ctx.round();
        }
      } else if (std::get_if<PullRequestMsg>(&d.payload)) {
        requests_.push_back(d.port);
      }
    }

    int pick = 1 + static_cast<int>(rng_.next_index(degree_));
    if (informed_) {
      ctx.send_raw(pick, RumorMsg{rumor_});
      for (int q : answer_)
        if (q != pick) ctx.send_raw(q, RumorMsg{rumor_});
    } else {
      ctx.send_raw(pick, PullRequestMsg{});
    }
    answer_ = std::move(requests_);
    requests_.clear();
    std::sort(answer_.begin(), answer_.end());
    answer_.erase(std::unique(answer_.begin(), answer_.end()), answer_.end());
    ctx.wake_at(ctx.round() + 1);
  }

  bool done() const override { return informed_; }
  bool informed() const { return informed_; }
  uint64_t rumor() const { return rumor_; }
  long informed_round() const { return informed_round_; }

 private:
  int degree_;
  bool informed_;
  uint64_t rumor_;
  Rng rng_;
  std::vector<int> requests_;  // arrived this round
  std::vector<int> answer_;    // to answer this round (arrived last round)
  long informed_round_ = 0;
};

}  // namespace

BroadcastResult push_pull_broadcast(const Graph& g, int source, uint64_t rumor,
                                    SimConfig sim_cfg) {
  if (source < 0 || source >= g.n()) throw PreconditionError("broadcast source out of range");
  auto factory = [&](int node, int degree, int, Rng rng) -> std::unique_ptr<Protocol> {
    return std::make_unique<RumorNode>(degree, node == source, rumor, rng);
  };
  Simulator sim(g, factory, sim_cfg);
  sim.set_stop_predicate([&](const Simulator& s) {
    for (int u = 0; u < s.graph().n(); ++u)
      if (!dynamic_cast<const RumorNode&>(s.protocol(u)).informed()) return false;
    return true;
  });

  BroadcastResult res;
  res.metrics = sim.run();
  res.rounds = 0;
  for (int u = 0; u < g.n(); ++u) {
    const auto& node = dynamic_cast<const RumorNode&>(sim.protocol(u));
    if (node.informed()) {
      res.informed += 1;
      res.rounds = std::max(res.rounds, node.informed_round());
      if (node.rumor() != rumor) res.value_agreement = false;
    }
  }
  res.all_informed = res.informed == g.n();
  res.metrics.outcome = res.all_informed ? "all_informed" : "partial_broadcast";
  return res;
}

}  // namespace rwle
