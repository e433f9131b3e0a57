#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rwle {

// CONGEST: one B-bit word per edge per round, B = ceil(log2 n).
// RELAXED: B^3-bit words (the large-message regime).
enum class Mode { kCongest, kRelaxed };

int word_bits(int n);  // B

// Units a payload of the given bit size occupies on a link.
long account_payload(long bits, Mode mode, int n);
long account_payload_b(long bits, Mode mode, int word_bits_b);

// ---- protocol payloads ----

// One aggregated random-walk token: origin contender, walk length marker and
// per-remaining-step counts (counts of parallel walks riding together).
struct WalkStep {
  long remaining = 0;  // steps left including the traversal in progress
  long count = 0;
};
struct WalkTokenMsg {
  uint64_t origin = 0;
  int phase = 0;
  std::vector<WalkStep> steps;
};

// Information-exchange waves along recorded walk routes.
//  kProxyReply : proxy -> contender. Proxy ids, distinctness contributions,
//                and ids of co-served contenders; merged at relays.
//  kOriginSpread : contender -> proxies, flooding the forward routes.
//  kProxyReturn : proxy -> contender, unioned returns.
enum class WaveKind : int { kProxyReply = 0, kOriginSpread = 1, kProxyReturn = 2 };

struct WaveMsg {
  WaveKind kind = WaveKind::kProxyReply;
  int phase = 0;
  uint64_t origin = 0;  // contender whose routes this wave travels
  std::vector<uint64_t> ids;
  std::vector<uint64_t> proxy_ids;  // kProxyReply only
  long d_delta = 0;                 // kProxyReply only
  bool winner_flag = false;
};

// Winner notification routed along a contender's walk routes.
struct WinnerMsg {
  uint64_t origin = 0;
  bool toward_origin = false;
};

// Push-pull broadcast payloads.
struct RumorMsg {
  uint64_t leader_id = 0;
};
struct PullRequestMsg {};

// Test payload.
struct PingMsg {
  long value = 0;
};

using Payload =
    std::variant<WalkTokenMsg, WaveMsg, WinnerMsg, RumorMsg, PullRequestMsg, PingMsg>;

const char* payload_tag(const Payload& p);

// Field bits: ids are 4B wide (drawn from [1, n^4]), counters B wide, flags
// one bit. The rumor value rides in a single CONGEST word.
long payload_bits(const Payload& p, int word_bits_b);

}  // namespace rwle
