#include "cse/program.hpp"

#include <sstream>

namespace cse {

std::vector<Edge> out_edges(const Program& p, LocId l) {
  if (l < 0 || l >= static_cast<LocId>(p.locations.size()))
    throw UnknownLocation("unknown location id " + std::to_string(l));
  std::vector<Edge> out;
  for (auto& e : p.fn_of(l).edges)
    if (e.src == l) out.push_back(e);
  return out;
}

std::vector<Edge> in_edges(const Program& p, LocId l) {
  if (l < 0 || l >= static_cast<LocId>(p.locations.size()))
    throw UnknownLocation("unknown location id " + std::to_string(l));
  std::vector<Edge> out;
  for (auto& e : p.fn_of(l).edges)
    if (e.dst == l) out.push_back(e);
  return out;
}

bool is_error_location(const Program& p, LocId l) {
  auto outs = out_edges(p, l);
  return outs.size() == 1 && outs[0].dst == l && outs[0].action.kind == ActionKind::Skip;
}

std::vector<VarId> global_vars(const Program& p) {
  std::vector<VarId> out = p.globals;
  for (auto& f : p.functions) out.push_back(f.ret_var);
  return out;
}

std::vector<VarId> frame_vars(const Function& f) {
  std::vector<VarId> out = f.params;
  out.insert(out.end(), f.locals.begin(), f.locals.end());
  return out;
}

namespace {

std::string render_action(const Program& p, const Action& a,
                          const std::vector<std::string>& names) {
  std::ostringstream os;
  switch (a.kind) {
    case ActionKind::Assign:
      os << names.at(static_cast<size_t>(a.var)) << " := "
         << render_expr(a.expr, names, false);
      break;
    case ActionKind::CallAssign:
    case ActionKind::CallVoid: {
      if (a.kind == ActionKind::CallAssign)
        os << names.at(static_cast<size_t>(a.var)) << " := ";
      os << p.functions.at(static_cast<size_t>(a.callee)).name << "(";
      for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ", ";
        os << render_expr(a.args[i], names, false);
      }
      os << ")";
      break;
    }
    case ActionKind::Ret:
      os << "ret " << render_expr(a.expr, names, false);
      break;
    case ActionKind::Skip: os << "skip"; break;
    case ActionKind::Guard: os << render_expr(a.expr, names, false); break;
    case ActionKind::MetaCall: {
      os << "meta_call " << p.functions.at(static_cast<size_t>(a.callee)).name << "(";
      for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ", ";
        os << render_expr(a.args[i], names, false);
      }
      os << ")";
      break;
    }
    case ActionKind::MetaReturn:
      os << "meta_ret";
      if (a.var >= 0) os << " " << names.at(static_cast<size_t>(a.var));
      break;
  }
  return os.str();
}

}  // namespace

std::string render_program(const Program& p) {
  auto names = p.symtab->names();
  std::ostringstream os;
  for (VarId g : p.globals) {
    const VarInfo& v = (*p.symtab)[g];
    os << "global " << v.name << " : " << sort_name(v.sort) << ";\n";
  }
  if (!p.globals.empty()) os << "\n";
  for (auto& f : p.functions) {
    os << "fn " << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      const VarInfo& v = (*p.symtab)[f.params[i]];
      os << v.name << " : " << sort_name(v.sort);
    }
    os << ") -> " << sort_name(f.return_type);
    if (f.id == p.start_function) os << " start";
    os << " {\n";
    os << "  entry " << p.loc_name(f.entry) << ";\n";
    os << "  exit " << p.loc_name(f.exit) << ";\n";
    if (!f.locals.empty()) {
      os << "  locals ";
      for (size_t i = 0; i < f.locals.size(); ++i) {
        if (i) os << ", ";
        const VarInfo& v = (*p.symtab)[f.locals[i]];
        os << v.name << " : " << sort_name(v.sort);
      }
      os << ";\n";
    }
    for (auto& e : f.edges) {
      os << "  " << p.loc_name(e.src) << " -> " << p.loc_name(e.dst) << " : "
         << render_action(p, e.action, names) << ";\n";
    }
    os << "}\n\n";
  }
  return os.str();
}

}  // namespace cse
