#include "cse/symstate.hpp"

#include <sstream>

#include "cse/templates.hpp"

namespace cse {

SymMemory initial_memory(const SymbolTable& st) {
  SymMemory m;
  m.values.reserve(st.vars.size());
  for (int i = 0; i < st.size(); ++i) m.values.push_back(mk_symbol(i, st.vars[i].sort));
  return m;
}

bool is_initial_entry(const SymMemory& m, VarId v) {
  const ExprPtr& e = m.at(v);
  return e->kind == ExprKind::Symbol && e->sym == v;
}

ProgramState make_initial_state(const Program& p) {
  ProgramState s;
  s.theta = initial_memory(*p.symtab);
  s.phi = mk_bool(true);
  s.loc = p.functions.at(static_cast<size_t>(p.start_function)).entry;
  return s;
}

ExprPtr eval_in_memory(const SymMemory& theta, const ExprPtr& e) {
  return substitute_symbols(e, theta.values);
}

SymMemory compose_memory(const SymMemory& theta, const SymMemory& theta2) {
  SymMemory out;
  out.values.reserve(theta2.values.size());
  for (auto& v : theta2.values) out.values.push_back(eval_in_memory(theta, v));
  return out;
}

CallStack compose_stack(const SymMemory& theta, const CallStack& xi) {
  CallStack out;
  out.reserve(xi.size());
  for (auto& r : xi) {
    if (auto* f = std::get_if<Frame>(&r)) {
      Frame g = *f;
      for (auto& v : g.saved) v = eval_in_memory(theta, v);
      out.push_back(std::move(g));
    } else {
      out.push_back(r);
    }
  }
  return out;
}

ProgramState compose_states(const ProgramState& s, const ProgramState& s2) {
  ProgramState out;
  out.theta = compose_memory(s.theta, s2.theta);
  out.phi = and_(s.phi, eval_in_memory(s.theta, s2.phi));
  out.xi = s.xi;
  CallStack shifted = compose_stack(s.theta, s2.xi);
  out.xi.insert(out.xi.end(), shifted.begin(), shifted.end());
  out.loc = s2.loc;
  return out;
}

long long Valuation::at(int param) const {
  auto it = v.find(param);
  if (it == v.end())
    throw UnboundParameter("valuation undefined for parameter " + std::to_string(param));
  return it->second;
}

ExprPtr apply_valuation(const ExprPtr& e, const Valuation& nu) {
  std::vector<std::pair<int, ExprPtr>> subst;
  for (int p : free_params(e)) subst.emplace_back(p, mk_int(nu.at(p)));
  ExprPtr t = subst.empty() ? e : substitute_params(e, subst);
  return expand_constant_foralls(t);
}

SymMemory apply_valuation(const SymMemory& m, const Valuation& nu) {
  SymMemory out;
  out.values.reserve(m.values.size());
  for (auto& v : m.values) out.values.push_back(apply_valuation(v, nu));
  return out;
}

CallStack apply_valuation(const CallStack& xi, const Valuation& nu) {
  CallStack out;
  for (auto& r : xi) {
    if (auto* f = std::get_if<Frame>(&r)) {
      Frame g = *f;
      for (auto& v : g.saved) v = apply_valuation(v, nu);
      out.push_back(std::move(g));
    } else if (auto* m = std::get_if<RecMarker>(&r)) {
      long long n = nu.at(m->param);
      for (long long i = 0; i < n; ++i) out.push_back(Wildcard{});
    } else {
      out.push_back(r);
    }
  }
  return out;
}

ProgramState apply_valuation(const ProgramState& s, const Valuation& nu) {
  ProgramState out;
  out.theta = apply_valuation(s.theta, nu);
  out.phi = apply_valuation(s.phi, nu);
  out.xi = apply_valuation(s.xi, nu);
  out.loc = s.loc;
  return out;
}

std::set<int> state_params(const ProgramState& s) {
  std::set<int> out;
  auto absorb = [&](const ExprPtr& e) {
    auto ps = free_params(e);
    out.insert(ps.begin(), ps.end());
  };
  for (auto& v : s.theta.values) absorb(v);
  absorb(s.phi);
  for (auto& r : s.xi) {
    if (auto* f = std::get_if<Frame>(&r)) {
      for (auto& v : f->saved) absorb(v);
    } else if (auto* m = std::get_if<RecMarker>(&r)) {
      out.insert(m->param);
    }
  }
  return out;
}

bool state_parameter_free(const ProgramState& s) { return state_params(s).empty(); }

std::string render_memory(const SymMemory& m, const SymbolTable& st, bool only_non_initial) {
  auto names = st.names();
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 0; i < m.size(); ++i) {
    if (only_non_initial && is_initial_entry(m, i)) continue;
    if (!first) os << ", ";
    first = false;
    os << names[static_cast<size_t>(i)] << " -> " << render_expr(m.at(i), names);
  }
  os << "}";
  return os.str();
}

std::string render_stack(const CallStack& xi, const Program& p) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < xi.size(); ++i) {
    if (i) os << ", ";
    if (auto* f = std::get_if<Frame>(&xi[i])) {
      os << "(" << p.functions.at(static_cast<size_t>(f->fn)).name << ", "
         << p.loc_name(f->return_loc) << ")";
    } else if (auto* m = std::get_if<RecMarker>(&xi[i])) {
      os << "(t@" << p.loc_name(m->tmpl->entry) << ", k" << m->param << ")";
    } else {
      os << "(_, _)";
    }
  }
  os << "]";
  return os.str();
}

std::string render_state(const ProgramState& s, const Program& p) {
  std::ostringstream os;
  os << "(" << render_memory(s.theta, *p.symtab) << ", "
     << render_expr(s.phi, p.symtab->names()) << ", " << render_stack(s.xi, p) << ", "
     << p.loc_name(s.loc) << ")";
  return os.str();
}

}  // namespace cse
