#include "cse/templates.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>

#include "cse/executor.hpp"
#include "cse/validator.hpp"

namespace cse {

const char* template_failure_name(TemplateFailureKind k) {
  switch (k) {
    case TemplateFailureKind::InfeasibleCycle: return "InfeasibleCycle";
    case TemplateFailureKind::UnclosedMemory: return "UnclosedMemory";
    case TemplateFailureKind::NoFeasibleExit: return "NoFeasibleExit";
    case TemplateFailureKind::ExitOverlap: return "ExitOverlap";
    case TemplateFailureKind::SolverUnknown: return "SolverUnknown";
    case TemplateFailureKind::ReturnPathBranches: return "ReturnPathBranches";
    case TemplateFailureKind::ExitOnCycleNoCopy: return "ExitOnCycleNoCopy";
    case TemplateFailureKind::MalformedPartProgram: return "MalformedPartProgram";
    case TemplateFailureKind::LocationRule: return "LocationRule";
  }
  return "?";
}

namespace {

constexpr int kKappa = 0;  // template parameter id
constexpr int kTau = 1;    // quantifier binder id

bool is_call_action(const Action& a) {
  return a.kind == ActionKind::CallAssign || a.kind == ActionKind::CallVoid;
}

// ---- cycle enumeration ------------------------------------------------------

struct CycleFinder {
  const Program& p;
  const Function& f;
  const DetectorLimits& limits;
  std::map<LocId, int> rank;
  std::vector<LocId> path;
  std::vector<int> path_edges;
  std::vector<std::pair<std::vector<LocId>, std::vector<int>>> found;

  CycleFinder(const Program& p, const Function& f, const DetectorLimits& limits)
      : p(p), f(f), limits(limits) {
    for (size_t i = 0; i < f.locations.size(); ++i)
      rank[f.locations[i]] = static_cast<int>(i);
  }

  void run() {
    for (LocId s : f.locations) {
      path = {s};
      path_edges.clear();
      dfs(s, s);
    }
  }

  void dfs(LocId start, LocId cur) {
    for (size_t ei = 0; ei < f.edges.size(); ++ei) {
      const Edge& e = f.edges[ei];
      if (e.src != cur || is_call_action(e.action)) continue;
      if (e.dst == start) {
        path_edges.push_back(static_cast<int>(ei));
        found.emplace_back(path, path_edges);
        path_edges.pop_back();
        continue;
      }
      if (rank[e.dst] <= rank[start]) continue;
      if (std::find(path.begin(), path.end(), e.dst) != path.end()) continue;
      if (static_cast<int>(path.size()) >= limits.max_cycle_len) continue;
      path.push_back(e.dst);
      path_edges.push_back(static_cast<int>(ei));
      dfs(start, e.dst);
      path.pop_back();
      path_edges.pop_back();
    }
  }
};

// Simple paths from the function entry to `target` over non-call edges.
struct PathFinder {
  const Function& f;
  const DetectorLimits& limits;
  LocId target;
  std::vector<LocId> path;
  std::vector<int> path_edges;
  std::vector<std::pair<std::vector<LocId>, std::vector<int>>> found;

  void run() {
    path = {f.entry};
    path_edges.clear();
    dfs(f.entry);
  }

  void dfs(LocId cur) {
    if (cur == target) {
      found.emplace_back(path, path_edges);
      return;
    }
    if (static_cast<int>(path.size()) >= limits.max_cycle_len) return;
    for (size_t ei = 0; ei < f.edges.size(); ++ei) {
      const Edge& e = f.edges[ei];
      if (e.src != cur || is_call_action(e.action)) continue;
      if (std::find(path.begin(), path.end(), e.dst) != path.end()) continue;
      path.push_back(e.dst);
      path_edges.push_back(static_cast<int>(ei));
      dfs(e.dst);
      path.pop_back();
      path_edges.pop_back();
    }
  }
};

std::vector<LocId> part_exits(const Program& p, const Function& f,
                              const std::vector<LocId>& cycle,
                              const std::vector<int>& cycle_edge_idx,
                              int excluded_edge) {
  std::vector<LocId> exits;
  for (size_t i = 0; i < cycle.size(); ++i) {
    for (size_t ei = 0; ei < f.edges.size(); ++ei) {
      const Edge& e = f.edges[ei];
      if (e.src != cycle[i]) continue;
      if (static_cast<int>(ei) == excluded_edge) continue;
      bool is_cycle_edge = i < cycle_edge_idx.size() &&
                           static_cast<int>(ei) == cycle_edge_idx[i];
      if (is_cycle_edge) continue;
      if (std::find(exits.begin(), exits.end(), e.dst) == exits.end())
        exits.push_back(e.dst);
    }
  }
  (void)p;
  return exits;
}

std::string cycle_key(const Program& p, const std::vector<LocId>& cycle) {
  std::string key;
  for (LocId l : cycle) {
    key += p.loc_name(l);
    key += ',';
  }
  return key;
}

}  // namespace

std::vector<CandidatePart> detect_candidate_parts(const Program& p,
                                                  const DetectorLimits& limits) {
  std::vector<CandidatePart> parts;

  for (auto& f : p.functions) {
    // Plain cycles.
    CycleFinder cf(p, f, limits);
    cf.run();
    for (auto& [cycle, edges] : cf.found) {
      // Rotate to the first location entered from outside the cycle; one
      // part per elementary cycle.
      for (size_t r = 0; r < cycle.size(); ++r) {
        LocId head = cycle[r];
        bool outside_in = false;
        for (auto& e : in_edges(p, head)) {
          if (std::find(cycle.begin(), cycle.end(), e.src) == cycle.end())
            outside_in = true;
        }
        if (!outside_in) continue;
        if (head == f.entry || head == f.exit) break;
        std::vector<LocId> rot;
        std::vector<int> rot_edges;
        for (size_t i = 0; i < cycle.size(); ++i) {
          rot.push_back(cycle[(r + i) % cycle.size()]);
          rot_edges.push_back(edges[(r + i) % cycle.size()]);
        }
        std::vector<LocId> exits = part_exits(p, f, rot, rot_edges, -1);
        if (exits.empty()) continue;
        bool exits_interior = true;
        for (LocId x : exits)
          if (x == f.entry || x == f.exit) exits_interior = false;
        if (!exits_interior) continue;
        CandidatePart part;
        part.kind = CandidatePart::Kind::Loop;
        part.fn = f.id;
        part.cycle = std::move(rot);
        part.cycle_edge_idx = std::move(rot_edges);
        part.entry = head;
        part.exits = std::move(exits);
        parts.push_back(std::move(part));
        break;
      }
    }

    // Direct recursion: one part per (call edge, entry-to-call path).
    for (size_t ei = 0; ei < f.edges.size(); ++ei) {
      const Edge& h = f.edges[ei];
      if (!is_call_action(h.action) || h.action.callee != f.id) continue;
      PathFinder pf{f, limits, h.src};
      pf.run();
      for (auto& [path, path_edges] : pf.found) {
        std::vector<LocId> exits =
            part_exits(p, f, path, path_edges, static_cast<int>(ei));
        bool exits_interior = true;
        for (LocId x : exits)
          if (x == f.entry || x == f.exit) exits_interior = false;
        if (!exits_interior) continue;

        RecursionInfo rec;
        rec.call_edge = h;
        rec.p2_straight = true;
        LocId cur = h.dst;
        rec.p2_path = {cur};
        for (int steps = 0; cur != f.exit; ++steps) {
          if (steps > limits.max_cycle_len) {
            rec.p2_straight = false;
            break;
          }
          auto outs = out_edges(p, cur);
          if (outs.size() != 1 || outs[0].action.kind == ActionKind::Guard ||
              is_call_action(outs[0].action)) {
            rec.p2_straight = false;
            break;
          }
          cur = outs[0].dst;
          rec.p2_path.push_back(cur);
        }

        CandidatePart part;
        part.kind = CandidatePart::Kind::Recursion;
        part.fn = f.id;
        part.cycle = path;
        part.cycle_edge_idx = path_edges;
        part.entry = f.entry;
        part.exits = std::move(exits);
        part.rec = std::move(rec);
        parts.push_back(std::move(part));
      }
    }
  }

  std::stable_sort(parts.begin(), parts.end(),
                   [&](const CandidatePart& a, const CandidatePart& b) {
                     const std::string& fa = p.functions[static_cast<size_t>(a.fn)].name;
                     const std::string& fb = p.functions[static_cast<size_t>(b.fn)].name;
                     if (fa != fb) return fa < fb;
                     return cycle_key(p, a.cycle) < cycle_key(p, b.cycle);
                   });
  if (static_cast<int>(parts.size()) > limits.max_parts)
    parts.resize(static_cast<size_t>(limits.max_parts));
  return parts;
}

namespace {

struct PartBuilder {
  const Program& origin;
  const Function& f;
  PartProgram pp;
  std::map<LocId, LocId> fwd;

  PartBuilder(const Program& p, FnId fn)
      : origin(p), f(p.functions.at(static_cast<size_t>(fn))) {
    pp.program.symtab = p.symtab;
    pp.program.globals = p.globals;
    pp.program.start_function = 0;
    Function nf;
    nf.name = f.name;
    nf.id = 0;
    nf.return_type = f.return_type;
    nf.params = f.params;
    nf.locals = f.locals;
    nf.ret_var = f.ret_var;
    pp.program.functions.push_back(std::move(nf));
  }

  LocId add(LocId orig, const std::string& name) {
    LocId id = static_cast<LocId>(pp.program.locations.size());
    pp.program.locations.push_back({name, 0});
    pp.program.functions[0].locations.push_back(id);
    if (orig >= 0) pp.origin_map[id] = orig;
    return id;
  }

  LocId map(LocId orig) {
    auto it = fwd.find(orig);
    if (it != fwd.end()) return it->second;
    LocId id = add(orig, origin.loc_name(orig));
    fwd[orig] = id;
    return id;
  }

  void edge(LocId src, LocId dst, Action a) {
    pp.program.functions[0].edges.push_back({src, dst, std::move(a)});
  }
};

Action meta_call_action(const Edge& call_edge) {
  Action a;
  a.kind = ActionKind::MetaCall;
  a.callee = call_edge.action.callee;
  a.args = call_edge.action.args;
  return a;
}

Action meta_return_action(const Edge& call_edge) {
  Action a;
  a.kind = ActionKind::MetaReturn;
  a.callee = call_edge.action.callee;
  a.var = call_edge.action.kind == ActionKind::CallAssign ? call_edge.action.var : -1;
  return a;
}

void finish_part(PartProgram& pp) {
  auto violations = validate_program(pp.program, ValidationMode::Part);
  if (!violations.empty()) {
    std::string msg = "part program invalid:";
    for (auto& v : violations) msg += " " + std::string(violation_name(v.kind));
    throw MalformedPart(msg);
  }
}

}  // namespace

PartProgram build_part_program(const Program& p, const CandidatePart& part, LocId exit_loc,
                               const DetectorLimits& limits) {
  if (std::find(part.exits.begin(), part.exits.end(), exit_loc) == part.exits.end())
    throw MalformedPart("exit location is not an exit of the part");
  const Function& f = p.functions.at(static_cast<size_t>(part.fn));

  // The escaping edge: first non-cycle out-edge of a cycle location reaching
  // exit_loc (the recursion call edge never escapes).
  int esc_edge = -1;
  size_t esc_pos = 0;
  for (size_t i = 0; i < part.cycle.size() && esc_edge < 0; ++i) {
    for (size_t ei = 0; ei < f.edges.size(); ++ei) {
      const Edge& e = f.edges[ei];
      if (e.src != part.cycle[i] || e.dst != exit_loc) continue;
      if (i < part.cycle_edge_idx.size() &&
          static_cast<int>(ei) == part.cycle_edge_idx[i])
        continue;
      if (part.rec && is_call_action(e.action)) continue;
      esc_edge = static_cast<int>(ei);
      esc_pos = i;
      break;
    }
  }
  if (esc_edge < 0) throw MalformedPart("no escaping edge to the requested exit");

  bool on_cycle =
      std::find(part.cycle.begin(), part.cycle.end(), exit_loc) != part.cycle.end();
  if (on_cycle && !limits.allow_exit_copy)
    throw ExitOnCycle("exit lies on the cycle and copying is disabled");

  PartBuilder b(p, part.fn);
  LocId entry_new = b.map(part.entry);
  for (LocId l : part.cycle) b.map(l);
  LocId exit_new =
      on_cycle ? b.add(exit_loc, p.loc_name(exit_loc) + "'") : b.map(exit_loc);
  LocId eprime = b.add(part.entry, p.loc_name(part.entry) + "'");

  // Cycle edges; the closing in-edge of the entry is redirected to e'.
  for (size_t i = 0; i < part.cycle.size(); ++i) {
    bool closing = i + 1 == part.cycle.size();
    LocId dst = closing ? eprime : b.map(part.cycle[i + 1]);
    Action a;
    if (i < part.cycle_edge_idx.size())
      a = f.edges[static_cast<size_t>(part.cycle_edge_idx[i])].action;
    else
      a = meta_call_action(part.rec->call_edge);  // recursion meta edge
    b.edge(b.map(part.cycle[i]), dst, std::move(a));
  }
  // Escape and the exit-turned-error-location.
  b.edge(b.map(part.cycle[esc_pos]), exit_new,
         f.edges[static_cast<size_t>(esc_edge)].action);
  Action skip;
  skip.kind = ActionKind::Skip;
  b.edge(exit_new, exit_new, skip);

  b.pp.program.functions[0].entry = entry_new;
  b.pp.program.functions[0].exit = eprime;
  b.pp.part_entry = entry_new;
  b.pp.new_exit = eprime;
  b.pp.error_exit = exit_new;

  finish_part(b.pp);
  return std::move(b.pp);
}

std::variant<PartProgram, TemplateFailure> build_return_part_program(
    const Program& p, const CandidatePart& part) {
  if (!part.rec) throw MalformedPart("not a recursion part");
  const RecursionInfo& rec = *part.rec;
  if (!rec.p2_straight)
    return TemplateFailure{TemplateFailureKind::ReturnPathBranches,
                           "return path from the call branches before the exit"};
  const Function& f = p.functions.at(static_cast<size_t>(part.fn));

  PartBuilder b(p, part.fn);
  LocId entry_new = b.map(f.exit);  // x is both entry and (conceptual) exit
  for (LocId l : rec.p2_path) {
    if (l != f.exit) b.map(l);
  }
  LocId eprime = b.add(f.exit, p.loc_name(f.exit) + "'");

  // Meta edge x -> v simulating the return, then the straight path back,
  // with its final edge into x redirected to e'.
  b.edge(entry_new, b.map(rec.p2_path.front()), meta_return_action(rec.call_edge));
  for (size_t i = 0; i + 1 < rec.p2_path.size(); ++i) {
    LocId src = rec.p2_path[i];
    LocId dst = rec.p2_path[i + 1];
    const Edge* found = nullptr;
    for (auto& e : f.edges)
      if (e.src == src && e.dst == dst) found = &e;
    if (!found) throw MalformedPart("broken return path");
    bool closing = dst == f.exit;
    b.edge(b.map(src), closing ? eprime : b.map(dst), found->action);
  }

  b.pp.program.functions[0].entry = entry_new;
  b.pp.program.functions[0].exit = eprime;
  b.pp.part_entry = entry_new;
  b.pp.new_exit = eprime;
  b.pp.error_exit = -1;

  finish_part(b.pp);
  return std::move(b.pp);
}

PartRun run_part(const PartProgram& pp, SatSolver& solver) {
  ExecConfig cfg;
  cfg.mode = ExecMode::Classic;
  cfg.build_tree = false;
  cfg.budget = 100000;
  cfg.solver = std::shared_ptr<SatSolver>(std::shared_ptr<void>(), &solver);
  ExecResult r = execute(pp.program, cfg);
  if (r.stats.budget_exhausted)
    throw NonTermination("part program did not terminate; detector bug");

  PartRun out;
  for (auto& s : r.final_states) {
    ProgramState relocated = s;
    relocated.loc = pp.origin_map.at(s.loc);
    if (s.loc == pp.new_exit) {
      out.cycle_state = std::move(relocated);
    } else if (s.loc == pp.error_exit) {
      out.exit_state = std::move(relocated);
    }
  }
  return out;
}

CloseResult close_memory_form(const SymMemory& theta, const SymbolTable& st, int kappa,
                              const std::vector<VarId>* restrict_to) {
  struct LinForm {
    std::map<int, long long> coeffs;
    long long c = 0;
  };
  // Sum-of-terms extraction over +, -, unary minus and constant scaling.
  std::function<std::optional<LinForm>(const ExprPtr&)> linear =
      [&](const ExprPtr& e) -> std::optional<LinForm> {
    switch (e->kind) {
      case ExprKind::IntConst: return LinForm{{}, e->ival};
      case ExprKind::Symbol:
        if (e->sort != Sort::Int) return std::nullopt;
        return LinForm{{{e->sym, 1}}, 0};
      case ExprKind::Neg: {
        auto k = linear(e->args[0]);
        if (!k) return std::nullopt;
        for (auto& [s, c] : k->coeffs) c = -c;
        k->c = -k->c;
        return k;
      }
      case ExprKind::Add:
      case ExprKind::Sub: {
        auto a = linear(e->args[0]);
        auto b = linear(e->args[1]);
        if (!a || !b) return std::nullopt;
        long long sign = e->kind == ExprKind::Add ? 1 : -1;
        for (auto& [s, c] : b->coeffs) a->coeffs[s] += sign * c;
        a->c += sign * b->c;
        return a;
      }
      case ExprKind::Mul: {
        auto a = linear(e->args[0]);
        auto b = linear(e->args[1]);
        if (!a || !b) return std::nullopt;
        if (a->coeffs.empty()) std::swap(a, b);
        if (!b->coeffs.empty()) return std::nullopt;
        for (auto& [s, c] : a->coeffs) c *= b->c;
        a->c *= b->c;
        return a;
      }
      default: return std::nullopt;
    }
  };

  SymMemory out;
  out.values.resize(theta.values.size());
  for (int v = 0; v < theta.size(); ++v) {
    ExprPtr ident = mk_symbol(v, st.vars[static_cast<size_t>(v)].sort);
    if (restrict_to && std::find(restrict_to->begin(), restrict_to->end(), v) ==
                           restrict_to->end()) {
      out.set(v, ident);
      continue;
    }
    const ExprPtr& e = theta.at(v);
    if (e->kind == ExprKind::Symbol && e->sym == v) {
      out.set(v, ident);  // identity, any sort
      continue;
    }
    if (st.vars[static_cast<size_t>(v)].sort == Sort::Int) {
      auto form = linear(e);
      if (form && form->coeffs.size() == 1 && form->coeffs.begin()->first == v &&
          form->coeffs.begin()->second == 1) {
        out.set(v, add(ident, mul(mk_int(form->c), mk_param(kappa, 'k'))));
        continue;
      }
    }
    return {std::nullopt, v};
  }
  return {std::move(out), -1};
}

namespace {

SymMemory rename_memory_param(const SymMemory& m, int from, const ExprPtr& repl) {
  SymMemory out;
  out.values.reserve(m.values.size());
  for (auto& v : m.values) out.values.push_back(substitute_param(v, from, repl));
  return out;
}

// Phase shared by plain loops and the calling phase of recursion.
struct Phase1 {
  SymMemory cycle_raw;
  SymMemory cycle_closed;
  int cycle_len = 0;
  std::vector<TemplateExit> exits;
};

std::variant<Phase1, TemplateFailure> compute_phase1(const Program& p,
                                                     const CandidatePart& part,
                                                     SatSolver& solver,
                                                     const DetectorLimits& limits) {
  const Function& f = p.functions.at(static_cast<size_t>(part.fn));
  Phase1 out;
  out.cycle_len = static_cast<int>(part.cycle.size());

  std::optional<ProgramState> cycle_state;
  struct ExitRun {
    LocId loc;
    ProgramState state;
    int exit_len;
  };
  std::vector<ExitRun> exit_runs;

  for (LocId x : part.exits) {
    PartProgram pp;
    try {
      pp = build_part_program(p, part, x, limits);
    } catch (const ExitOnCycle& e) {
      return TemplateFailure{TemplateFailureKind::ExitOnCycleNoCopy, e.what()};
    } catch (const MalformedPart& e) {
      return TemplateFailure{TemplateFailureKind::MalformedPartProgram, e.what()};
    }
    PartRun run = run_part(pp, solver);
    if (!cycle_state && run.cycle_state) cycle_state = run.cycle_state;
    if (run.exit_state) {
      // Steps from the entry through the escaping edge.
      int prefix = 0;
      for (size_t i = 0; i < part.cycle.size(); ++i) {
        bool has_escape = false;
        for (size_t ei = 0; ei < f.edges.size(); ++ei) {
          const Edge& e = f.edges[ei];
          if (e.src == part.cycle[i] && e.dst == x &&
              !(i < part.cycle_edge_idx.size() &&
                static_cast<int>(ei) == part.cycle_edge_idx[i]) &&
              !(part.rec && is_call_action(e.action)))
            has_escape = true;
        }
        if (has_escape) {
          prefix = static_cast<int>(i);
          break;
        }
      }
      exit_runs.push_back({x, *run.exit_state, prefix + 1});
    }
  }

  if (!cycle_state)
    return TemplateFailure{TemplateFailureKind::InfeasibleCycle,
                           "no real path around the cycle"};
  if (exit_runs.empty())
    return TemplateFailure{TemplateFailureKind::NoFeasibleExit,
                           "no exit is reachable from the entry"};

  out.cycle_raw = cycle_state->theta;
  CloseResult closed = close_memory_form(out.cycle_raw, *p.symtab, kKappa);
  if (!closed.memory)
    return TemplateFailure{
        TemplateFailureKind::UnclosedMemory,
        "variable '" + (*p.symtab)[closed.failed_var].name + "' has no closed form"};
  out.cycle_closed = *closed.memory;

  const ExprPtr kappa = mk_param(kKappa, 'k');
  const ExprPtr phi_cycle = cycle_state->phi;
  SymMemory closed_tau = rename_memory_param(out.cycle_closed, kKappa, mk_param(kTau, 't'));

  for (auto& er : exit_runs) {
    TemplateExit te;
    te.loc = er.loc;
    te.exit_len = er.exit_len;
    te.theta = compose_memory(out.cycle_closed, er.state.theta);
    ExprPtr iterated = eval_in_memory(closed_tau, phi_cycle);
    te.phi = and_all({le(mk_int(0), kappa),
                      forall_in_range(kTau, 't', mk_int(0), kappa, iterated),
                      eval_in_memory(out.cycle_closed, er.state.phi)});
    te.xi = compose_stack(out.cycle_closed, er.state.xi);
    out.exits.push_back(std::move(te));
  }
  return out;
}

}  // namespace

std::optional<TemplateFailure> validate_template_conditions(const Program& p,
                                                            const Template& t,
                                                            SatSolver& solver) {
  for (auto& e : t.exits) {
    SatResult r = solver.check(SatQuery::make(e.phi, p.symtab), false);
    if (r.verdict == Verdict::Unknown)
      return TemplateFailure{TemplateFailureKind::SolverUnknown,
                             "satisfiability of an exit condition is unknown"};
    if (r.verdict == Verdict::Unsat)
      return TemplateFailure{TemplateFailureKind::NoFeasibleExit,
                             "exit condition unsatisfiable at " + p.loc_name(e.loc)};
  }
  for (size_t i = 0; i < t.exits.size(); ++i) {
    for (size_t j = i + 1; j < t.exits.size(); ++j) {
      SatResult r = solver.check(
          SatQuery::make(and_(t.exits[i].phi, t.exits[j].phi), p.symtab), false);
      if (r.verdict == Verdict::Sat)
        return TemplateFailure{TemplateFailureKind::ExitOverlap,
                               "exit conditions at " + p.loc_name(t.exits[i].loc) +
                                   " and " + p.loc_name(t.exits[j].loc) + " overlap"};
      if (r.verdict == Verdict::Unknown)
        return TemplateFailure{TemplateFailureKind::SolverUnknown,
                               "exit exclusivity is unknown"};
    }
  }
  return std::nullopt;
}

TemplateResult compute_loop_template(const Program& p, const CandidatePart& part,
                                     SatSolver& solver, const DetectorLimits& limits) {
  const Function& f = p.functions.at(static_cast<size_t>(part.fn));
  if (part.entry == f.entry || part.entry == f.exit)
    return TemplateFailure{TemplateFailureKind::LocationRule,
                           "loop template entry at a function entry/exit"};
  auto phase = compute_phase1(p, part, solver, limits);
  if (auto* fail = std::get_if<TemplateFailure>(&phase)) return *fail;
  Phase1& p1 = std::get<Phase1>(phase);

  Template t;
  t.entry = part.entry;
  t.param = kKappa;
  t.exits = std::move(p1.exits);
  t.cycle_len = p1.cycle_len;
  t.cycle_raw = std::move(p1.cycle_raw);
  t.cycle_closed = std::move(p1.cycle_closed);
  t.part = part;
  if (auto fail = validate_template_conditions(p, t, solver)) return *fail;
  return t;
}

TemplateResult compute_recursion_template(const Program& p, const CandidatePart& part,
                                          SatSolver& solver,
                                          const DetectorLimits& limits) {
  const Function& f = p.functions.at(static_cast<size_t>(part.fn));
  auto phase = compute_phase1(p, part, solver, limits);
  if (auto* fail = std::get_if<TemplateFailure>(&phase)) return *fail;
  Phase1& p1 = std::get<Phase1>(phase);

  auto p2built = build_return_part_program(p, part);
  if (auto* fail = std::get_if<TemplateFailure>(&p2built)) return *fail;
  PartProgram& pp2 = std::get<PartProgram>(p2built);
  PartRun run2 = run_part(pp2, solver);
  if (!run2.cycle_state)
    return TemplateFailure{TemplateFailureKind::InfeasibleCycle,
                           "return path is not executable"};
  // No branching along the return path, so its condition stays true.
  if (run2.cycle_state->phi->kind != ExprKind::BoolConst ||
      !run2.cycle_state->phi->bval)
    return TemplateFailure{TemplateFailureKind::MalformedPartProgram,
                           "return path produced a non-trivial condition"};

  std::vector<VarId> ret_and_globals = global_vars(p);
  CloseResult closed = close_memory_form(run2.cycle_state->theta, *p.symtab, kKappa,
                                         &ret_and_globals);
  if (!closed.memory)
    return TemplateFailure{
        TemplateFailureKind::UnclosedMemory,
        "return value of '" + f.name + "' has no closed form"};

  RecursionPhase rec;
  rec.theta_ret = *closed.memory;
  rec.raw = run2.cycle_state->theta;
  rec.ret_loc = f.exit;
  rec.cycle_len = static_cast<int>(pp2.program.functions[0].edges.size());

  Template t;
  t.entry = part.entry;
  t.param = kKappa;
  t.exits = std::move(p1.exits);
  t.recursion = std::move(rec);
  t.cycle_len = p1.cycle_len;
  t.cycle_raw = std::move(p1.cycle_raw);
  t.cycle_closed = std::move(p1.cycle_closed);
  t.part = part;

  // Entry and return locations must be the entry/exit of a function that is
  // actually called.
  bool called = false;
  for (auto& g : p.functions)
    for (auto& e : g.edges)
      if (is_call_action(e.action) && e.action.callee == part.fn) called = true;
  if (t.entry != f.entry || t.recursion->ret_loc != f.exit || !called)
    return TemplateFailure{TemplateFailureKind::LocationRule,
                           "recursion template locations are not a called function's "
                           "entry/exit"};

  if (auto fail = validate_template_conditions(p, t, solver)) return *fail;
  return t;
}

TemplateReport compute_all_templates(const Program& p, SatSolver& solver,
                                     const DetectorLimits& limits) {
  TemplateReport report;
  for (auto& part : detect_candidate_parts(p, limits)) {
    TemplateResult r = part.kind == CandidatePart::Kind::Loop
                           ? compute_loop_template(p, part, solver, limits)
                           : compute_recursion_template(p, part, solver, limits);
    if (auto* t = std::get_if<Template>(&r))
      report.templates.push_back(std::move(*t));
    else
      report.failures.emplace_back(part, std::get<TemplateFailure>(r));
  }
  return report;
}

Template rename_template_param(const Template& t, int fresh_param) {
  Template out = t;
  out.param = fresh_param;
  ExprPtr repl = mk_param(fresh_param, 'k');
  auto rename_mem = [&](SymMemory& m) {
    for (auto& v : m.values) v = substitute_param(v, t.param, repl);
  };
  auto rename_stack = [&](CallStack& xi) {
    for (auto& r : xi) {
      if (auto* f = std::get_if<Frame>(&r))
        for (auto& v : f->saved) v = substitute_param(v, t.param, repl);
    }
  };
  for (auto& e : out.exits) {
    rename_mem(e.theta);
    e.phi = substitute_param(e.phi, t.param, repl);
    rename_stack(e.xi);
  }
  if (out.recursion) {
    rename_mem(out.recursion->theta_ret);
    rename_mem(out.recursion->raw);
  }
  rename_mem(out.cycle_raw);
  rename_mem(out.cycle_closed);
  return out;
}

std::string render_part(const Program& p, const CandidatePart& part) {
  std::ostringstream os;
  os << (part.kind == CandidatePart::Kind::Loop ? "loop" : "recursion") << " part in "
     << p.functions[static_cast<size_t>(part.fn)].name << ": cycle ";
  for (size_t i = 0; i < part.cycle.size(); ++i)
    os << (i ? "," : "") << p.loc_name(part.cycle[i]);
  os << "," << p.loc_name(part.cycle[0]);
  os << "; entry " << p.loc_name(part.entry) << "; exits ";
  for (size_t i = 0; i < part.exits.size(); ++i)
    os << (i ? "," : "") << p.loc_name(part.exits[i]);
  return os.str();
}

std::string render_template(const Program& p, const Template& t) {
  auto names = p.symtab->names();
  std::ostringstream os;
  os << "template entry=" << p.loc_name(t.entry) << " n=" << t.n()
     << " kind=" << (t.is_recursion() ? "recursion" : "general") << "\n";
  for (auto& e : t.exits) {
    os << "  exit " << p.loc_name(e.loc) << ":\n";
    os << "    theta: " << render_memory(e.theta, *p.symtab) << "\n";
    os << "    phi:   " << render_expr(e.phi, names) << "\n";
    os << "    stack: " << render_stack(e.xi, p) << "\n";
  }
  if (t.recursion) {
    os << "  return " << p.loc_name(t.recursion->ret_loc) << ":\n";
    os << "    theta_ret: " << render_memory(t.recursion->theta_ret, *p.symtab) << "\n";
  }
  return os.str();
}

}  // namespace cse
