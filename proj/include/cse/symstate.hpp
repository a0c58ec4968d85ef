//===-- symstate.hpp - symbolic memories, stacks and program states -------===//
#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "cse/program.hpp"
#include "cse/symexpr.hpp"

namespace cse {

struct Template;  // defined in templates.hpp

// Total map from program variables to symbolic expressions, indexed like the
// symbol table.
struct SymMemory {
  std::vector<ExprPtr> values;

  const ExprPtr& at(VarId v) const { return values.at(static_cast<size_t>(v)); }
  void set(VarId v, ExprPtr e) { values.at(static_cast<size_t>(v)) = std::move(e); }
  int size() const { return static_cast<int>(values.size()); }
};

// The initial symbolic memory: variable i holds symbol alpha_i.
SymMemory initial_memory(const SymbolTable& st);
bool is_initial_entry(const SymMemory& m, VarId v);

// One pending call: the caller's locals/params saved for restoration, plus
// the return location. The call edge identifies the destination variable.
struct Frame {
  FnId fn;                       // function whose frame this is (the caller)
  std::vector<VarId> domain;     // caller's params + locals
  std::vector<ExprPtr> saved;    // values, aligned with domain
  LocId return_loc;
  FnId callee = -1;
  VarId call_dest = -1;          // -1 for void calls
};

// Stands for any number of pending recursive frames of one template
// instantiation; valuation expands it into Wildcard records.
struct RecMarker {
  std::shared_ptr<const Template> tmpl;
  int param;
};

// Matches any single stack record; only produced by valuation.
struct Wildcard {};

using StackRecord = std::variant<Frame, RecMarker, Wildcard>;
using CallStack = std::vector<StackRecord>;  // bottom first

struct ProgramState {
  SymMemory theta;
  ExprPtr phi;
  CallStack xi;
  LocId loc = -1;
};

ProgramState make_initial_state(const Program& p);

// theta[[e]]: replace every symbol alpha_i in e by theta(variable i).
// Program expressions and symbolic expressions share the representation, so
// this is also the evaluation of concrete expressions in a memory.
ExprPtr eval_in_memory(const SymMemory& theta, const ExprPtr& e);

// (theta o theta')(a) = theta[[theta'(a)]]
SymMemory compose_memory(const SymMemory& theta, const SymMemory& theta2);
CallStack compose_stack(const SymMemory& theta, const CallStack& xi);

// s o s' = (theta o theta', phi and theta[[phi']], Xi o (theta o Xi'), l')
ProgramState compose_states(const ProgramState& s, const ProgramState& s2);

// ---- valuation ------------------------------------------------------------

// Finite map from parameters to non-negative integers.
struct Valuation {
  std::map<int, long long> v;

  long long at(int param) const;
  bool defined(int param) const { return v.count(param) != 0; }
};

struct UnboundParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExprPtr apply_valuation(const ExprPtr& e, const Valuation& nu);
SymMemory apply_valuation(const SymMemory& m, const Valuation& nu);
CallStack apply_valuation(const CallStack& xi, const Valuation& nu);
ProgramState apply_valuation(const ProgramState& s, const Valuation& nu);

bool state_parameter_free(const ProgramState& s);
std::set<int> state_params(const ProgramState& s);

// ---- rendering ------------------------------------------------------------

std::string render_memory(const SymMemory& m, const SymbolTable& st,
                          bool only_non_initial = true);
std::string render_stack(const CallStack& xi, const Program& p);
std::string render_state(const ProgramState& s, const Program& p);

}  // namespace cse
