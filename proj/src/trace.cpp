#include "flecs/trace.hpp"

namespace flecs {

const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::kToggle: return "toggle";
    case TraceKind::kPhase: return "phase";
    case TraceKind::kSubgoal: return "subgoal";
    case TraceKind::kSelectOp: return "select-op";
    case TraceKind::kApply: return "apply";
    case TraceKind::kBacktrack: return "backtrack";
    case TraceKind::kDeepen: return "deepen";
    case TraceKind::kPrune: return "prune";
  }
  return "?";
}

std::string TraceEvent::line() const {
  return std::to_string(seq) + "\t" + to_string(kind) + "\t" + payload;
}

}  // namespace flecs
