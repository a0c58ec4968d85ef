#include "cse/validator.hpp"

#include <algorithm>

namespace cse {

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::EntryHasInEdge: return "EntryHasInEdge";
    case ViolationKind::ExitHasOutEdge: return "ExitHasOutEdge";
    case ViolationKind::NonGuardOutDegree: return "NonGuardOutDegree";
    case ViolationKind::GuardOutDegree: return "GuardOutDegree";
    case ViolationKind::GuardsNotNegated: return "GuardsNotNegated";
    case ViolationKind::MixedOutEdges: return "MixedOutEdges";
    case ViolationKind::StartFunctionCalled: return "StartFunctionCalled";
    case ViolationKind::CallAtEntryOrExit: return "CallAtEntryOrExit";
    case ViolationKind::DeadEndLocation: return "DeadEndLocation";
    case ViolationKind::UnknownLocationInEdge: return "UnknownLocationInEdge";
    case ViolationKind::NoStartFunction: return "NoStartFunction";
  }
  return "?";
}

namespace {

bool is_call(const Action& a) {
  return a.kind == ActionKind::CallAssign || a.kind == ActionKind::CallVoid;
}

}  // namespace

std::vector<Violation> validate_program(const Program& p, ValidationMode mode) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind k, const Function& f, const std::string& where,
                    const std::string& msg) {
    out.push_back({k, f.name, where, msg});
  };

  if (p.start_function < 0) {
    out.push_back({ViolationKind::NoStartFunction, "", "", "no start function"});
    return out;
  }

  for (auto& f : p.functions) {
    for (auto& e : f.edges) {
      bool known = std::find(f.locations.begin(), f.locations.end(), e.src) !=
                       f.locations.end() &&
                   std::find(f.locations.begin(), f.locations.end(), e.dst) !=
                       f.locations.end();
      if (!known)
        report(ViolationKind::UnknownLocationInEdge, f,
               p.loc_name(e.src) + " -> " + p.loc_name(e.dst),
               "edge endpoints must be locations of the owning function");
      if (is_call(e.action)) {
        if (e.action.callee == p.start_function)
          report(ViolationKind::StartFunctionCalled, f,
                 p.loc_name(e.src) + " -> " + p.loc_name(e.dst),
                 "call action references the start function");
        const Function& callee = p.functions[static_cast<size_t>(e.action.callee)];
        for (LocId l : {e.src, e.dst}) {
          if (l == f.entry || l == f.exit || l == callee.entry || l == callee.exit)
            report(ViolationKind::CallAtEntryOrExit, f, p.loc_name(l),
                   "entry/exit location incident to a call edge");
        }
      }
    }

    if (!in_edges(p, f.entry).empty())
      report(ViolationKind::EntryHasInEdge, f, p.loc_name(f.entry),
             "entry location has an in-edge");
    if (!out_edges(p, f.exit).empty())
      report(ViolationKind::ExitHasOutEdge, f, p.loc_name(f.exit),
             "exit location has an out-edge");

    for (LocId l : f.locations) {
      auto outs = out_edges(p, l);
      if (outs.empty()) {
        if (l != f.exit)
          report(ViolationKind::DeadEndLocation, f, p.loc_name(l),
                 "non-exit location has no out-edge");
        continue;
      }
      bool any_guard = false, any_other = false;
      for (auto& e : outs)
        (e.action.kind == ActionKind::Guard ? any_guard : any_other) = true;
      if (any_guard && any_other) {
        report(ViolationKind::MixedOutEdges, f, p.loc_name(l),
               "location mixes guard and non-guard out-edges");
        continue;
      }
      if (!any_guard) {
        if (outs.size() != 1)
          report(ViolationKind::NonGuardOutDegree, f, p.loc_name(l),
                 "location with an assignment/call/ret/skip out-edge must have out-degree 1");
        continue;
      }
      if (outs.size() == 1) {
        if (mode == ValidationMode::Strict)
          report(ViolationKind::GuardOutDegree, f, p.loc_name(l),
                 "branching location must have out-degree 2");
        continue;
      }
      if (outs.size() != 2) {
        report(ViolationKind::GuardOutDegree, f, p.loc_name(l),
               "branching location must have out-degree 2");
        continue;
      }
      if (!is_syntactic_negation(outs[0].action.expr, outs[1].action.expr))
        report(ViolationKind::GuardsNotNegated, f, p.loc_name(l),
               "guards are not syntactic negations of each other");
    }
  }
  return out;
}

}  // namespace cse
