#pragma once

#include <string>
#include <vector>

#include "modgen/ast.hpp"

namespace modgen {

enum class TraceOutcome { Completed, RuntimeFault, StepLimit };

enum class FaultKind { None, NullDeref, IndexOutOfRange };

inline const char* faultName(FaultKind k) {
  switch (k) {
    case FaultKind::None: return "NONE";
    case FaultKind::NullDeref: return "NULL_DEREF";
    case FaultKind::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
  }
  return "?";
}

// One branch arm taken during execution. The arm actually taken has
// distance 0 by definition; `oppositeDistance` is the raw (unnormalized)
// distance to flipping the predicate and is strictly positive.
struct BranchEvent {
  BranchGoalId goalTaken;
  double oppositeDistance = 0.0;
  std::string rootMethod;  // method invoked by the enclosing top-level test statement
  long long stepIndex = 0;
};

struct ExecutionTrace {
  std::vector<BranchEvent> events;
  TraceOutcome outcome = TraceOutcome::Completed;
  FaultKind fault = FaultKind::None;
  SrcPos faultPos;
  long long steps = 0;

  bool completed() const { return outcome == TraceOutcome::Completed; }

  // Line-oriented debug form, one event per line.
  std::string dump() const {
    std::string out;
    for (const auto& e : events) {
      out += e.goalTaken.str();
      out += " root=" + e.rootMethod;
      out += " opposite=" + std::to_string(e.oppositeDistance);
      out += " step=" + std::to_string(e.stepIndex);
      out += '\n';
    }
    switch (outcome) {
      case TraceOutcome::Completed:
        out += "outcome=COMPLETED";
        break;
      case TraceOutcome::RuntimeFault:
        out += "outcome=RUNTIME_FAULT kind=";
        out += faultName(fault);
        out += " at=" + std::to_string(faultPos.line) + ":" + std::to_string(faultPos.col);
        break;
      case TraceOutcome::StepLimit:
        out += "outcome=STEP_LIMIT";
        break;
    }
    out += " steps=" + std::to_string(steps);
    out += '\n';
    return out;
  }
};

// Events whose call chain is rooted at `target` (qualified method name).
inline std::vector<BranchEvent> attributedEvents(const ExecutionTrace& trace,
                                                 const std::string& target) {
  std::vector<BranchEvent> out;
  for (const auto& e : trace.events)
    if (e.rootMethod == target) out.push_back(e);
  return out;
}

}  // namespace modgen
