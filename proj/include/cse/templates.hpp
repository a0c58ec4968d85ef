//===-- templates.hpp - loop/recursion summaries ---------------------------===//
//
// Detects candidate program parts (simple cycles and direct-recursion call
// cycles), carves them into standalone part programs, runs them classically,
// closes the one-iteration memory into a parametric form and assembles
// templates: the entry location plus parametrized exit states
// (theta_i, phi_i, Xi_i, l_i)<kappa>, with a shared-parameter return memory
// for recursion.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cse/solver.hpp"
#include "cse/symstate.hpp"

namespace cse {

struct DetectorLimits {
  int max_cycle_len = 16;
  int max_parts = 64;
  bool allow_exit_copy = true;
};

struct RecursionInfo {
  Edge call_edge;              // h = (u, v), action calls the enclosing function
  std::vector<LocId> p2_path;  // locations v .. exit (empty when invalid)
  bool p2_straight = false;    // no branching/calls along v .. exit
};

struct CandidatePart {
  enum class Kind : uint8_t { Loop, Recursion } kind;
  FnId fn;
  std::vector<LocId> cycle;  // entry first; closes back to the entry
  // Index into the function's edge list of the edge leaving cycle[i]; for
  // recursion parts the closing meta edge is synthesized, so there is one
  // fewer entry than cycle locations.
  std::vector<int> cycle_edge_idx;
  LocId entry;
  std::vector<LocId> exits;
  std::optional<RecursionInfo> rec;
};

struct PartProgram {
  Program program;  // shares the origin's symbol table
  LocId part_entry;
  LocId new_exit;                    // e', target of the redirected cycle edge
  LocId error_exit = -1;             // the exit turned error location, if any
  std::map<LocId, LocId> origin_map; // part location -> origin location
};

struct ExitOnCycle : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedPart : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonTermination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TemplateExit {
  SymMemory theta;
  ExprPtr phi;
  CallStack xi;
  LocId loc;
  int exit_len = 0;  // classic steps from the part entry out through this exit
};

struct RecursionPhase {
  SymMemory theta_ret;  // <kappa>-closed, ret/globals only
  SymMemory raw;        // one-return memory it was closed from
  LocId ret_loc;        // l': the function's exit
  int cycle_len = 0;    // classic steps per unwound return
};

struct Template {
  LocId entry = -1;
  int param = 0;  // kappa; the only free parameter anywhere in the template
  std::vector<TemplateExit> exits;
  std::optional<RecursionPhase> recursion;
  int cycle_len = 0;      // classic steps per cycle iteration
  SymMemory cycle_raw;    // one-iteration memory
  SymMemory cycle_closed; // theta<kappa>
  CandidatePart part;

  bool is_recursion() const { return recursion.has_value(); }
  int n() const { return static_cast<int>(exits.size()); }
};

enum class TemplateFailureKind : uint8_t {
  InfeasibleCycle,
  UnclosedMemory,
  NoFeasibleExit,
  ExitOverlap,
  SolverUnknown,
  ReturnPathBranches,
  ExitOnCycleNoCopy,
  MalformedPartProgram,
  LocationRule,  // Def-style entry/exit placement violated
};

struct TemplateFailure {
  TemplateFailureKind kind;
  std::string detail;
};

const char* template_failure_name(TemplateFailureKind k);

using TemplateResult = std::variant<Template, TemplateFailure>;

// ---- operations -------------------------------------------------------------

std::vector<CandidatePart> detect_candidate_parts(const Program& p,
                                                  const DetectorLimits& limits = {});

// Carves the part program for one exit: cycle plus the entry-to-exit path,
// the cycle's entry in-edge redirected to a fresh exit e', the exit location
// turned into an error location (copied off-cycle first when needed).
PartProgram build_part_program(const Program& p, const CandidatePart& part, LocId exit_loc,
                               const DetectorLimits& limits = {});

// The return-phase part for a recursion candidate (P2).
std::variant<PartProgram, TemplateFailure> build_return_part_program(
    const Program& p, const CandidatePart& part);

struct PartRun {
  std::optional<ProgramState> cycle_state;  // one full iteration, relocated to the entry
  std::optional<ProgramState> exit_state;   // entry-to-exit traversal at the exit
};

PartRun run_part(const PartProgram& pp, SatSolver& solver);

struct CloseResult {
  std::optional<SymMemory> memory;
  VarId failed_var = -1;
};

// theta<kappa> per variable: identity stays identity, theta(a) = Theta(a) + c
// becomes Theta(a) + c*kappa, anything else fails. With restrict_to set, only
// those variables are closed and the rest are pinned to identity.
CloseResult close_memory_form(const SymMemory& theta, const SymbolTable& st, int kappa,
                              const std::vector<VarId>* restrict_to = nullptr);

TemplateResult compute_loop_template(const Program& p, const CandidatePart& part,
                                     SatSolver& solver, const DetectorLimits& limits = {});

TemplateResult compute_recursion_template(const Program& p, const CandidatePart& part,
                                          SatSolver& solver,
                                          const DetectorLimits& limits = {});

// Exit-condition side conditions: every phi_i satisfiable, every pairwise
// conjunction unsatisfiable under the shared parameter.
std::optional<TemplateFailure> validate_template_conditions(const Program& p,
                                                            const Template& t,
                                                            SatSolver& solver);

struct TemplateReport {
  std::vector<Template> templates;
  std::vector<std::pair<CandidatePart, TemplateFailure>> failures;
};

TemplateReport compute_all_templates(const Program& p, SatSolver& solver,
                                     const DetectorLimits& limits = {});

// Fresh copy of the template with its parameter renamed.
Template rename_template_param(const Template& t, int fresh_param);

std::string render_template(const Program& p, const Template& t);
std::string render_part(const Program& p, const CandidatePart& part);

}  // namespace cse
