#include <cctype>
#include <map>
#include <sstream>

#include "cse/solver.hpp"

namespace cse {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

SatQuery SatQuery::make(ExprPtr formula, std::shared_ptr<const SymbolTable> symtab) {
  if (formula->sort != Sort::Bool) throw SortError("SatQuery formula must be boolean");
  SatQuery q;
  q.free_symbols = used_symbols(formula);
  q.free_parameters = free_params(formula);
  q.formula = std::move(formula);
  q.symtab = std::move(symtab);
  return q;
}

namespace smt {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

std::string symbol_name(const SymbolTable& st, int var, const std::string& prefix) {
  return prefix + "s" + std::to_string(var) + "_" +
         sanitize(st.vars.at(static_cast<size_t>(var)).name);
}

std::string param_name(int id, const std::string& prefix) {
  return prefix + "k" + std::to_string(id);
}

namespace {

// depth of enclosing binders keyed by param id; binder names are derived from
// the id, shadowing just rebinds the same name.
using BinderEnv = std::map<int, std::string>;

void render(const ExprPtr& e, const SymbolTable& st, const std::string& prefix,
            BinderEnv& env, std::ostream& os) {
  switch (e->kind) {
    case ExprKind::IntConst:
      if (e->ival < 0)
        os << "(- " << -(e->ival) << ")";
      else
        os << e->ival;
      return;
    case ExprKind::BoolConst:
      os << (e->bval ? "true" : "false");
      return;
    case ExprKind::Symbol:
      os << symbol_name(st, e->sym, prefix);
      return;
    case ExprKind::Param: {
      auto it = env.find(e->param);
      if (it != env.end())
        os << it->second;
      else
        os << param_name(e->param, prefix);
      return;
    }
    case ExprKind::Neg:
      os << "(- ";
      render(e->args[0], st, prefix, env, os);
      os << ")";
      return;
    case ExprKind::Not:
      os << "(not ";
      render(e->args[0], st, prefix, env, os);
      os << ")";
      return;
    case ExprKind::Read: {
      if (e->args[0]->kind != ExprKind::Symbol)
        throw UnsupportedSort("array read base must be an array symbol");
      os << "(" << symbol_name(st, e->args[0]->sym, prefix) << " ";
      render(e->args[1], st, prefix, env, os);
      os << ")";
      return;
    }
    case ExprKind::Forall: {
      std::string b = "q" + std::to_string(e->param);
      os << "(forall ((" << b << " Int)) (=> (and (<= ";
      render(e->args[0], st, prefix, env, os);
      os << " " << b << ") (< " << b << " ";
      render(e->args[1], st, prefix, env, os);
      os << ")) ";
      auto saved = env.find(e->param);
      std::string old;
      bool had = saved != env.end();
      if (had) old = saved->second;
      env[e->param] = b;
      render(e->args[2], st, prefix, env, os);
      if (had)
        env[e->param] = old;
      else
        env.erase(e->param);
      os << "))";
      return;
    }
    default:
      break;
  }
  const char* op = nullptr;
  switch (e->kind) {
    case ExprKind::Add: op = "+"; break;
    case ExprKind::Sub: op = "-"; break;
    case ExprKind::Mul: op = "*"; break;
    case ExprKind::Div: op = "div"; break;
    case ExprKind::Mod: op = "mod"; break;
    case ExprKind::Lt: op = "<"; break;
    case ExprKind::Le: op = "<="; break;
    case ExprKind::Gt: op = ">"; break;
    case ExprKind::Ge: op = ">="; break;
    case ExprKind::Eq: op = "="; break;
    case ExprKind::Ne: op = "distinct"; break;
    case ExprKind::And: op = "and"; break;
    case ExprKind::Or: op = "or"; break;
    default: throw UnsupportedSort("unsupported expression kind in SMT rendering");
  }
  os << "(" << op;
  for (auto& a : e->args) {
    os << " ";
    render(a, st, prefix, env, os);
  }
  os << ")";
}

}  // namespace

std::string render_formula(const ExprPtr& e, const SymbolTable& st,
                           const std::string& prefix) {
  std::ostringstream os;
  BinderEnv env;
  render(e, st, prefix, env, os);
  return os.str();
}

std::string declarations(const SatQuery& q, const std::string& prefix) {
  std::ostringstream os;
  for (int v : q.free_symbols) {
    const VarInfo& info = (*q.symtab)[v];
    std::string n = symbol_name(*q.symtab, v, prefix);
    switch (info.sort) {
      case Sort::Int: os << "(declare-const " << n << " Int)\n"; break;
      case Sort::Bool: os << "(declare-const " << n << " Bool)\n"; break;
      case Sort::Array: os << "(declare-fun " << n << " (Int) Int)\n"; break;
    }
  }
  for (int p : q.free_parameters) {
    std::string n = param_name(p, prefix);
    os << "(declare-const " << n << " Int)\n";
    os << "(assert (>= " << n << " 0))\n";
  }
  return os.str();
}

}  // namespace smt

std::string to_smtlib(const SatQuery& q) {
  std::ostringstream os;
  os << "(set-logic UFLIA)\n";
  os << smt::declarations(q, "");
  os << "(assert " << smt::render_formula(q.formula, *q.symtab, "") << ")\n";
  os << "(check-sat)\n";
  os << "(get-model)\n";
  return os.str();
}

}  // namespace cse
