#pragma once

#include "rwle/sim.hpp"

namespace rwle {

struct BroadcastResult {
  RunMetrics metrics;
  long rounds = 0;  // rounds until the last node learned the rumor
  bool all_informed = false;
  long informed = 0;
  bool value_agreement = true;  // every informed node holds the source's value
};

// Push-pull rumor spreading: each round every node picks one uniformly
// random port; informed nodes push the rumor, uninformed nodes send a
// one-unit pull request which an informed neighbor answers the next round.
BroadcastResult push_pull_broadcast(const Graph& g, int source, uint64_t rumor,
                                    SimConfig sim_cfg);

}  // namespace rwle
