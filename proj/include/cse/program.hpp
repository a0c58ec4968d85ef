//===-- program.hpp - CFG program model -----------------------------------===//
//
// Programs are collections of global variables and functions; each function
// is a graph of locations with action-labelled edges (assignments, calls,
// returns, skips and guard pairs). Every function owns an implicit global
// return variable. Variables are indexed program-wide and double as the
// indices of their input symbols.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cse/symexpr.hpp"

namespace cse {

using VarId = int;
using LocId = int;
using FnId = int;
using EdgeId = int;

enum class VarKind : uint8_t { Global, Param, Local, Ret };

struct VarInfo {
  std::string name;
  Sort sort;
  FnId owner = -1;  // -1 for globals (including ret variables)
  VarKind kind = VarKind::Global;
};

// Program-wide variable registry; the index of a variable is also the index
// of its input symbol.
struct SymbolTable {
  std::vector<VarInfo> vars;

  int size() const { return static_cast<int>(vars.size()); }
  const VarInfo& operator[](VarId v) const { return vars.at(static_cast<size_t>(v)); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(vars.size());
    for (auto& v : vars) out.push_back(v.name);
    return out;
  }
};

enum class ActionKind : uint8_t {
  Assign,      // var := expr
  CallAssign,  // var := callee(args)
  CallVoid,    // callee(args)
  Ret,         // ret expr
  Skip,
  Guard,       // boolean expression
  MetaCall,    // internal: simultaneous formal<-actual binding (part programs)
  MetaReturn,  // internal: dest := ret_callee, or skip for void calls
};

// Program expressions are symbolic expressions whose Symbol nodes stand for
// program variables.
struct Action {
  ActionKind kind;
  VarId var = -1;              // Assign/CallAssign/MetaReturn destination
  FnId callee = -1;            // CallAssign/CallVoid/MetaCall/MetaReturn
  std::vector<ExprPtr> args;   // call actuals
  ExprPtr expr;                // Assign rhs / Ret value / Guard condition
};

struct Edge {
  LocId src;
  LocId dst;
  Action action;
};

struct Location {
  std::string name;
  FnId fn;
};

struct Function {
  std::string name;
  FnId id = -1;
  Sort return_type = Sort::Int;
  std::vector<VarId> params;
  std::vector<VarId> locals;
  VarId ret_var = -1;  // the implicit global ret variable
  std::vector<LocId> locations;
  LocId entry = -1;
  LocId exit = -1;
  std::vector<Edge> edges;
};

struct Program {
  std::shared_ptr<const SymbolTable> symtab;
  std::vector<VarId> globals;  // explicit globals, declaration order
  std::vector<Function> functions;
  std::vector<Location> locations;  // program-wide location registry
  FnId start_function = -1;

  const Function& fn_of(LocId l) const {
    return functions.at(static_cast<size_t>(locations.at(static_cast<size_t>(l)).fn));
  }
  const std::string& loc_name(LocId l) const {
    return locations.at(static_cast<size_t>(l)).name;
  }
  std::optional<FnId> find_function(const std::string& name) const {
    for (auto& f : functions)
      if (f.name == name) return f.id;
    return std::nullopt;
  }
};

struct UnknownLocation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Out-edges of l in declaration order.
std::vector<Edge> out_edges(const Program& p, LocId l);
std::vector<Edge> in_edges(const Program& p, LocId l);

// A location with a single self-looping skip edge.
bool is_error_location(const Program& p, LocId l);

// All variables whose values are compared under global-variable equivalence:
// explicit globals plus every function's ret variable.
std::vector<VarId> global_vars(const Program& p);

// Locals and params of one function, the frame domain at call sites.
std::vector<VarId> frame_vars(const Function& f);

// Canonical textual rendering; parses back to a structurally identical
// program.
std::string render_program(const Program& p);

}  // namespace cse
