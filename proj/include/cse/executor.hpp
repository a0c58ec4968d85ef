//===-- executor.hpp - symbolic execution engine ----------------------------===//
//
// Breadth-first symbolic execution over the CFG model: classic King-style
// forking, and compact execution that instantiates templates at their entry
// locations and unwinds recursion markers at function exits. Successors are
// kept when their path condition is not unsatisfiable; Unknown verdicts keep
// the successor and are recorded on the vertex.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cse/solver.hpp"
#include "cse/symstate.hpp"
#include "cse/templates.hpp"

namespace cse {

enum class ExecMode : uint8_t { Classic, Compact };
enum class ChooseStrategy : uint8_t { First, Random };

struct ExecConfig {
  ExecMode mode = ExecMode::Classic;
  bool build_tree = true;
  uint64_t budget = 1000;  // max processed states
  std::shared_ptr<SatSolver> solver;
  std::shared_ptr<const std::vector<Template>> templates;  // compact mode
  ChooseStrategy choose = ChooseStrategy::First;
  uint64_t seed = 0;
};

enum class EdgeVerdict : uint8_t { Sat, Unknown, Inherited };

// Symbolic path length of a vertex: base + sum(coeff * param). Classic steps
// contribute 1; a template instantiation contributes its expansion length as
// a function of the instantiation parameter.
struct PathLength {
  long long base = 0;
  std::vector<std::pair<int, long long>> coeffs;  // param -> weight

  long long eval(const Valuation& nu) const;
  PathLength plus_const(long long c) const;
  PathLength plus_param(int param, long long weight, long long c) const;
};

struct TreeVertex {
  ProgramState state;
  int parent = -1;
  ExprPtr edge_label;          // evaluated guard / instantiated exit condition / true
  EdgeVerdict verdict = EdgeVerdict::Inherited;
  std::vector<int> children;
  PathLength depth;
  bool is_final = false;
};

struct SymExecTree {
  std::vector<TreeVertex> vertices;  // index 0 is the root

  int size() const { return static_cast<int>(vertices.size()); }
  std::vector<int> leaves() const;
};

struct ExecStats {
  uint64_t processed = 0;
  uint64_t solver_calls = 0;
  uint64_t unknown_verdicts = 0;
  bool budget_exhausted = false;
  // Min classic-step depth of the unprocessed frontier; everything strictly
  // shorter is fully explored. Meaningful only when budget_exhausted.
  std::optional<long long> frontier_depth;
};

struct ExecResult {
  std::vector<ProgramState> final_states;  // E
  std::optional<SymExecTree> tree;
  ExecStats stats;
};

ProgramState initial_state(const Program& p);

// One classic step: all successor candidates of a non-final state, without
// feasibility filtering (the main loop decides which survive).
struct Successor {
  ProgramState state;
  ExprPtr edge_label;
  bool phi_changed = false;
};

struct StuckState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LocationMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MarkerMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Successor> classic_successors(const Program& p, const ProgramState& s);

// s composed with each parametrized exit of t under a fresh parameter;
// labels are s.theta[[t.phi_i<kappa>]].
std::vector<Successor> instantiate_template(const ProgramState& s, const Template& t,
                                            int fresh_param);

// Same, but splices a recursion marker (t, kappa) below the template stack;
// the marker keeps a reference to the template for the return phase.
std::vector<Successor> instantiate_recursion_entry(const ProgramState& s,
                                                   std::shared_ptr<const Template> t,
                                                   int fresh_param);

// Pops the marker and composes the return memory under the marker's kappa.
Successor instantiate_recursion_return(const ProgramState& s);

bool is_final_state(const Program& p, const ProgramState& s);

ExecResult execute(const Program& p, const ExecConfig& cfg);

}  // namespace cse
