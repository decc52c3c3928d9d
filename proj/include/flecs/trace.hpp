#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace flecs {

enum class TraceKind {
  kToggle,
  kPhase,
  kSubgoal,
  kSelectOp,
  kApply,
  kBacktrack,
  kDeepen,
  kPrune,
};

const char* to_string(TraceKind k);

struct TraceEvent {
  std::uint64_t seq = 0;
  TraceKind kind = TraceKind::kToggle;
  std::string payload;

  // "seq<TAB>kind<TAB>payload" — stable field order, byte-reproducible.
  std::string line() const;
};

using TraceSink = std::function<void(const TraceEvent&)>;

}  // namespace flecs
