//===-- executor.cpp - breadth-first symbolic execution ---------------------===//
#include "cse/executor.hpp"

#include <cassert>
#include <deque>
#include <random>

namespace cse {

long long PathLength::eval(const Valuation& nu) const {
  long long out = base;
  for (auto& [param, w] : coeffs) out += w * nu.at(param);
  return out;
}

PathLength PathLength::plus_const(long long c) const {
  PathLength out = *this;
  out.base += c;
  return out;
}

PathLength PathLength::plus_param(int param, long long weight, long long c) const {
  PathLength out = *this;
  out.base += c;
  for (auto& [p, w] : out.coeffs) {
    if (p == param) {
      w += weight;
      return out;
    }
  }
  out.coeffs.emplace_back(param, weight);
  return out;
}

std::vector<int> SymExecTree::leaves() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (vertices[static_cast<size_t>(i)].children.empty()) out.push_back(i);
  return out;
}

ProgramState initial_state(const Program& p) { return make_initial_state(p); }

bool is_final_state(const Program& p, const ProgramState& s) {
  const Function& start = p.functions.at(static_cast<size_t>(p.start_function));
  if (s.loc == start.exit && s.xi.empty()) return true;
  return is_error_location(p, s.loc);
}

namespace {

ExprPtr true_label() {
  static const ExprPtr t = mk_bool(true);
  return t;
}

SymMemory reset_frame_vars(const SymbolTable& st, SymMemory theta, const Function& f) {
  for (VarId v : frame_vars(f))
    theta.set(v, mk_symbol(v, st.vars[static_cast<size_t>(v)].sort));
  return theta;
}

}  // namespace

std::vector<Successor> classic_successors(const Program& p, const ProgramState& s) {
  const Function& f = p.fn_of(s.loc);
  std::vector<Successor> out;

  // Return from a call: the frame on top of the stack drives the step.
  if (s.loc == f.exit) {
    if (s.xi.empty() || !std::holds_alternative<Frame>(s.xi.back()))
      throw StuckState("function exit without a frame to return to");
    const Frame& fr = std::get<Frame>(s.xi.back());
    ProgramState next;
    // Returning function's locals become undefined again, then the caller's
    // saved values come back.
    next.theta = reset_frame_vars(*p.symtab, s.theta, f);
    for (size_t i = 0; i < fr.domain.size(); ++i)
      next.theta.set(fr.domain[i], fr.saved[i]);
    if (fr.call_dest >= 0) next.theta.set(fr.call_dest, s.theta.at(f.ret_var));
    next.phi = s.phi;
    next.xi = CallStack(s.xi.begin(), s.xi.end() - 1);
    next.loc = fr.return_loc;
    out.push_back({std::move(next), true_label(), false});
    return out;
  }

  auto outs = out_edges(p, s.loc);
  if (outs.empty()) throw StuckState("non-final location without out-edges");

  for (auto& e : outs) {
    const Action& a = e.action;
    switch (a.kind) {
      case ActionKind::Guard: {
        ExprPtr label = eval_in_memory(s.theta, a.expr);
        ProgramState next;
        next.theta = s.theta;
        next.phi = and_(s.phi, label);
        next.xi = s.xi;
        next.loc = e.dst;
        out.push_back({std::move(next), std::move(label), true});
        break;
      }
      case ActionKind::Assign: {
        ProgramState next = s;
        next.theta.set(a.var, eval_in_memory(s.theta, a.expr));
        next.loc = e.dst;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
      case ActionKind::Ret: {
        ProgramState next = s;
        next.theta.set(f.ret_var, eval_in_memory(s.theta, a.expr));
        next.loc = e.dst;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
      case ActionKind::Skip: {
        ProgramState next = s;
        next.loc = e.dst;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
      case ActionKind::CallAssign:
      case ActionKind::CallVoid: {
        const Function& callee = p.functions.at(static_cast<size_t>(a.callee));
        std::vector<ExprPtr> args;
        args.reserve(a.args.size());
        for (auto& arg : a.args) args.push_back(eval_in_memory(s.theta, arg));
        Frame fr;
        fr.fn = f.id;
        fr.domain = frame_vars(f);
        for (VarId v : fr.domain) fr.saved.push_back(s.theta.at(v));
        fr.return_loc = e.dst;
        fr.callee = a.callee;
        fr.call_dest = a.kind == ActionKind::CallAssign ? a.var : -1;
        ProgramState next;
        next.theta = reset_frame_vars(*p.symtab, s.theta, callee);
        for (size_t i = 0; i < args.size(); ++i)
          next.theta.set(callee.params[i], args[i]);
        next.phi = s.phi;
        next.xi = s.xi;
        next.xi.push_back(std::move(fr));
        next.loc = callee.entry;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
      case ActionKind::MetaCall: {
        // The pre-body effect of a recursive call: evaluate actuals, reset
        // the callee's locals, bind formals simultaneously. No frame.
        const Function& callee = p.functions.at(static_cast<size_t>(a.callee));
        std::vector<ExprPtr> args;
        args.reserve(a.args.size());
        for (auto& arg : a.args) args.push_back(eval_in_memory(s.theta, arg));
        ProgramState next;
        next.theta = reset_frame_vars(*p.symtab, s.theta, callee);
        for (size_t i = 0; i < args.size(); ++i)
          next.theta.set(callee.params[i], args[i]);
        next.phi = s.phi;
        next.xi = s.xi;
        next.loc = e.dst;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
      case ActionKind::MetaReturn: {
        ProgramState next = s;
        if (a.var >= 0)
          next.theta.set(a.var,
                         s.theta.at(p.functions.at(static_cast<size_t>(a.callee)).ret_var));
        next.loc = e.dst;
        out.push_back({std::move(next), true_label(), false});
        break;
      }
    }
  }
  return out;
}

std::vector<Successor> instantiate_template(const ProgramState& s, const Template& t,
                                            int fresh_param) {
  if (s.loc != t.entry) throw LocationMismatch("state is not at the template entry");
  Template rt = rename_template_param(t, fresh_param);
  std::vector<Successor> out;
  for (auto& exit : rt.exits) {
    ProgramState ts;
    ts.theta = exit.theta;
    ts.phi = exit.phi;
    ts.xi = exit.xi;
    ts.loc = exit.loc;
    ExprPtr label = eval_in_memory(s.theta, exit.phi);
    out.push_back({compose_states(s, ts), std::move(label), true});
  }
  return out;
}

std::vector<Successor> instantiate_recursion_entry(const ProgramState& s,
                                                   std::shared_ptr<const Template> t,
                                                   int fresh_param) {
  if (!t->is_recursion()) throw LocationMismatch("not a recursion template");
  if (s.loc != t->entry) throw LocationMismatch("state is not at the template entry");
  Template rt = rename_template_param(*t, fresh_param);
  std::vector<Successor> out;
  for (auto& exit : rt.exits) {
    ProgramState ts;
    ts.theta = exit.theta;
    ts.phi = exit.phi;
    ts.xi.push_back(RecMarker{t, fresh_param});
    ts.xi.insert(ts.xi.end(), exit.xi.begin(), exit.xi.end());
    ts.loc = exit.loc;
    ExprPtr label = eval_in_memory(s.theta, exit.phi);
    out.push_back({compose_states(s, ts), std::move(label), true});
  }
  return out;
}

Successor instantiate_recursion_return(const ProgramState& s) {
  if (s.xi.empty() || !std::holds_alternative<RecMarker>(s.xi.back()))
    throw MarkerMismatch("no recursion marker on top of the stack");
  const RecMarker& m = std::get<RecMarker>(s.xi.back());
  const Template& t = *m.tmpl;
  if (!t.recursion || s.loc != t.recursion->ret_loc)
    throw MarkerMismatch("state is not at the marker's return location");
  ExprPtr repl = mk_param(m.param, 'k');
  SymMemory theta_ret;
  theta_ret.values.reserve(t.recursion->theta_ret.values.size());
  for (auto& v : t.recursion->theta_ret.values)
    theta_ret.values.push_back(substitute_param(v, t.param, repl));

  ProgramState next;
  next.theta = compose_memory(s.theta, theta_ret);
  next.phi = s.phi;
  next.xi = CallStack(s.xi.begin(), s.xi.end() - 1);
  next.loc = t.recursion->ret_loc;
  return {std::move(next), true_label(), false};
}

namespace {

struct QueueItem {
  ProgramState state;
  int vertex = -1;
  PathLength depth;
  EdgeVerdict verdict = EdgeVerdict::Sat;
};

bool marker_return_applies(const ProgramState& s) {
  if (s.xi.empty()) return false;
  auto* m = std::get_if<RecMarker>(&s.xi.back());
  if (!m) return false;
  return m->tmpl->recursion && s.loc == m->tmpl->recursion->ret_loc;
}

}  // namespace

ExecResult execute(const Program& p, const ExecConfig& cfg) {
  if (cfg.budget == 0) throw std::invalid_argument("budget must be positive");
  if (!cfg.solver) throw std::invalid_argument("execute needs a solver");
  if (cfg.mode == ExecMode::Compact && !cfg.templates)
    throw std::invalid_argument("compact mode needs a template set (possibly empty)");
  cfg.solver->new_session();

  uint64_t solver_before = cfg.solver->query_count();
  uint64_t unknown_before = cfg.solver->unknown_count();

  ExecResult result;
  if (cfg.build_tree) result.tree.emplace();

  // Fresh parameters start above any id used inside templates (kappa=0 and
  // the quantifier binder).
  int next_param = 2;
  std::mt19937_64 rng(cfg.seed);

  std::deque<QueueItem> queue;
  QueueItem root;
  root.state = make_initial_state(p);
  root.depth = PathLength{};
  if (result.tree) {
    TreeVertex v;
    v.state = root.state;
    v.parent = -1;
    v.edge_label = mk_bool(true);
    v.verdict = EdgeVerdict::Sat;
    v.depth = root.depth;
    result.tree->vertices.push_back(std::move(v));
    root.vertex = 0;
  }
  queue.push_back(std::move(root));

  auto find_templates_at = [&](LocId l) {
    std::vector<int> out;
    if (cfg.mode != ExecMode::Compact) return out;
    for (size_t i = 0; i < cfg.templates->size(); ++i)
      if ((*cfg.templates)[i].entry == l) out.push_back(static_cast<int>(i));
    return out;
  };

  while (!queue.empty()) {
    if (result.stats.processed >= cfg.budget) {
      result.stats.budget_exhausted = true;
      long long frontier = -1;
      for (auto& item : queue) {
        Valuation zero;
        for (auto& [param, w] : item.depth.coeffs) zero.v[param] = 0;
        long long d = item.depth.eval(zero);
        frontier = frontier < 0 ? d : std::min(frontier, d);
      }
      if (frontier >= 0) result.stats.frontier_depth = frontier;
      break;
    }
    QueueItem item = std::move(queue.front());
    queue.pop_front();
    ++result.stats.processed;

    if (is_final_state(p, item.state)) {
      result.final_states.push_back(item.state);
      if (result.tree) result.tree->vertices[static_cast<size_t>(item.vertex)].is_final = true;
      continue;
    }

    std::vector<Successor> successors;
    struct Expansion {
      int param = -1;
      long long weight = 0;
      std::vector<long long> exit_lens;
    } expansion;

    if (cfg.mode == ExecMode::Compact && marker_return_applies(item.state)) {
      const RecMarker& m = std::get<RecMarker>(item.state.xi.back());
      successors.push_back(instantiate_recursion_return(item.state));
      expansion.param = m.param;
      expansion.weight = m.tmpl->recursion->cycle_len;
      expansion.exit_lens = {0};
    } else {
      std::vector<int> ts = find_templates_at(item.state.loc);
      if (!ts.empty()) {
        int pick = ts[0];
        if (cfg.choose == ChooseStrategy::Random && ts.size() > 1) {
          std::uniform_int_distribution<size_t> dist(0, ts.size() - 1);
          pick = ts[dist(rng)];
        }
        const Template& t = (*cfg.templates)[static_cast<size_t>(pick)];
        int kappa = next_param++;
        if (t.is_recursion()) {
          std::shared_ptr<const Template> tp(cfg.templates,
                                             &(*cfg.templates)[static_cast<size_t>(pick)]);
          successors = instantiate_recursion_entry(item.state, tp, kappa);
        } else {
          successors = instantiate_template(item.state, t, kappa);
        }
        expansion.param = kappa;
        expansion.weight = t.cycle_len;
        for (auto& e : t.exits) expansion.exit_lens.push_back(e.exit_len);
      } else {
        successors = classic_successors(p, item.state);
      }
    }

    for (size_t i = 0; i < successors.size(); ++i) {
      Successor& succ = successors[i];
      EdgeVerdict verdict;
      if (!succ.phi_changed) {
        verdict = EdgeVerdict::Inherited;
      } else if (succ.state.phi->kind == ExprKind::BoolConst) {
        if (!succ.state.phi->bval) continue;  // unsatisfiable successor
        verdict = EdgeVerdict::Sat;
      } else {
        SatResult r = cfg.solver->check(SatQuery::make(succ.state.phi, p.symtab), false);
        if (r.verdict == Verdict::Unsat) continue;
        verdict = r.verdict == Verdict::Sat ? EdgeVerdict::Sat : EdgeVerdict::Unknown;
        if (verdict == EdgeVerdict::Unknown) ++result.stats.unknown_verdicts;
      }

      QueueItem next;
      next.state = std::move(succ.state);
      next.verdict = verdict;
      next.depth = expansion.param >= 0
                       ? item.depth.plus_param(expansion.param, expansion.weight,
                                               expansion.exit_lens[i])
                       : item.depth.plus_const(1);
      if (result.tree) {
        TreeVertex v;
        v.state = next.state;
        v.parent = item.vertex;
        v.edge_label = succ.edge_label;
        v.verdict = verdict;
        v.depth = next.depth;
        next.vertex = result.tree->size();
        result.tree->vertices[static_cast<size_t>(item.vertex)].children.push_back(
            next.vertex);
        result.tree->vertices.push_back(std::move(v));
      }
      queue.push_back(std::move(next));
    }
  }

  result.stats.solver_calls = cfg.solver->query_count() - solver_before;
  (void)unknown_before;
  return result;
}

}  // namespace cse
