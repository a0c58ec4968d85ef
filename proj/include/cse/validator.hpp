#pragma once

#include <string>
#include <vector>

#include "cse/program.hpp"

namespace cse {

enum class ViolationKind : uint8_t {
  EntryHasInEdge,
  ExitHasOutEdge,
  NonGuardOutDegree,     // a location with an action-(1)-(4) out-edge has out-degree != 1
  GuardOutDegree,        // a guard location's out-degree is not 2 (strict mode)
  GuardsNotNegated,      // the two guards are not syntactic negations
  MixedOutEdges,         // guard and non-guard out-edges at one location
  StartFunctionCalled,
  CallAtEntryOrExit,     // entry/exit location incident to a call edge
  DeadEndLocation,       // non-exit location with no out-edge
  UnknownLocationInEdge,
  NoStartFunction,
};

struct Violation {
  ViolationKind kind;
  std::string fn;
  std::string where;  // location or edge description
  std::string message;
};

// Strict validates the surface definition; Part additionally accepts
// out-degree-1 guard edges and meta actions, which part programs need.
enum class ValidationMode : uint8_t { Strict, Part };

std::vector<Violation> validate_program(const Program& p,
                                        ValidationMode mode = ValidationMode::Strict);

const char* violation_name(ViolationKind k);

}  // namespace cse
