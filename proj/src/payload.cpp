#include "rwle/payload.hpp"

#include <bit>
#include <cmath>

#include "rwle/errors.hpp"

namespace rwle {

int word_bits(int n) {
  if (n < 2) throw InvalidSizeError("word size needs n >= 2");
  unsigned v = static_cast<unsigned>(n);
  int b = std::bit_width(v);
  if (std::has_single_bit(v)) --b;  // ceil(log2 n)
  return b < 1 ? 1 : b;
}

long account_payload_b(long bits, Mode mode, int b) {
  if (bits < 1) throw InvalidSpecError("payload must have at least one bit");
  long word = (mode == Mode::kCongest) ? b : static_cast<long>(b) * b * b;
  return (bits + word - 1) / word;
}

long account_payload(long bits, Mode mode, int n) {
  return account_payload_b(bits, mode, word_bits(n));
}

const char* payload_tag(const Payload& p) {
  switch (p.index()) {
    case 0: return "token";
    case 1: {
      switch (std::get<WaveMsg>(p).kind) {
        case WaveKind::kProxyReply: return "reply1";
        case WaveKind::kOriginSpread: return "spread2";
        case WaveKind::kProxyReturn: return "return3";
      }
      return "wave";
    }
    case 2: return std::get<WinnerMsg>(p).toward_origin ? "winner_rev" : "winner_fwd";
    case 3: return "rumor";
    case 4: return "pull_req";
    default: return "ping";
  }
}

long payload_bits(const Payload& p, int b) {
  struct Visitor {
    long b;
    long operator()(const WalkTokenMsg& m) const {
      return 4 * b + b + static_cast<long>(m.steps.size()) * 2 * b;
    }
    long operator()(const WaveMsg& m) const {
      long bits = 4 * b + 1;  // route origin + winner flag
      bits += 4 * b * static_cast<long>(m.ids.size() + m.proxy_ids.size());
      if (m.kind == WaveKind::kProxyReply) bits += b;  // distinctness sum
      return bits;
    }
    long operator()(const WinnerMsg&) const { return 4 * b + 1; }
    long operator()(const RumorMsg&) const { return b; }
    long operator()(const PullRequestMsg&) const { return 1; }
    long operator()(const PingMsg&) const { return b; }
  };
  return std::visit(Visitor{b}, p);
}

}  // namespace rwle
