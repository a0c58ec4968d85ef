#include "cse/symexpr.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace cse {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::Array: return "int[]";
  }
  return "?";
}

namespace {

ExprPtr make(ExprKind k, Sort s, std::vector<ExprPtr> args = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->sort = s;
  e->args = std::move(args);
  return e;
}

void require_sort(const ExprPtr& e, Sort s, const char* where) {
  if (e->sort != s)
    throw SortError(std::string(where) + ": expected " + sort_name(s) + ", got " +
                    sort_name(e->sort));
}

bool is_int_const(const ExprPtr& e) { return e->kind == ExprKind::IntConst; }
bool is_bool_const(const ExprPtr& e) { return e->kind == ExprKind::BoolConst; }

std::optional<long long> fold_arith(ExprKind k, long long a, long long b) {
  long long r = 0;
  switch (k) {
    case ExprKind::Add:
      if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
      return r;
    case ExprKind::Sub:
      if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
      return r;
    case ExprKind::Mul:
      if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
      return r;
    case ExprKind::Div:
      if (b == 0) return std::nullopt;  // left symbolic; programs guard this
      return euclid_div(a, b);
    case ExprKind::Mod:
      if (b == 0) return std::nullopt;
      return euclid_mod(a, b);
    default:
      return std::nullopt;
  }
}

}  // namespace

long long euclid_div(long long a, long long b) {
  assert(b != 0);
  long long q = a / b;
  if (a % b < 0) q += (b > 0) ? -1 : 1;
  return q;
}

long long euclid_mod(long long a, long long b) {
  assert(b != 0);
  long long r = a % b;
  if (r < 0) r += (b > 0) ? b : -b;
  return r;
}

ExprPtr mk_int(long long v) {
  auto e = make(ExprKind::IntConst, Sort::Int);
  const_cast<Expr&>(*e).ival = v;
  return e;
}

ExprPtr mk_bool(bool b) {
  auto e = make(ExprKind::BoolConst, Sort::Bool);
  const_cast<Expr&>(*e).bval = b;
  return e;
}

ExprPtr mk_symbol(int var_index, Sort sort) {
  auto e = make(ExprKind::Symbol, sort);
  const_cast<Expr&>(*e).sym = var_index;
  return e;
}

ExprPtr mk_param(int id, char tag) {
  auto e = make(ExprKind::Param, Sort::Int);
  Expr& m = const_cast<Expr&>(*e);
  m.param = id;
  m.param_tag = tag;
  return e;
}

ExprPtr neg(ExprPtr e) {
  require_sort(e, Sort::Int, "neg");
  if (is_int_const(e) && e->ival != INT64_MIN) return mk_int(-e->ival);
  return make(ExprKind::Neg, Sort::Int, {std::move(e)});
}

ExprPtr not_(ExprPtr e) {
  require_sort(e, Sort::Bool, "not");
  if (is_bool_const(e)) return mk_bool(!e->bval);
  return make(ExprKind::Not, Sort::Bool, {std::move(e)});
}

namespace {

ExprPtr arith(ExprKind k, ExprPtr a, ExprPtr b, const char* name) {
  require_sort(a, Sort::Int, name);
  require_sort(b, Sort::Int, name);
  if (is_int_const(a) && is_int_const(b)) {
    if (auto v = fold_arith(k, a->ival, b->ival)) return mk_int(*v);
  }
  // Unit and zero identities; still constant-driven folding.
  if (k == ExprKind::Add) {
    if (is_int_const(a) && a->ival == 0) return b;
    if (is_int_const(b) && b->ival == 0) return a;
  }
  if (k == ExprKind::Sub && is_int_const(b) && b->ival == 0) return a;
  if (k == ExprKind::Mul) {
    if (is_int_const(a) && a->ival == 1) return b;
    if (is_int_const(b) && b->ival == 1) return a;
    if ((is_int_const(a) && a->ival == 0) || (is_int_const(b) && b->ival == 0))
      return mk_int(0);
  }
  if (k == ExprKind::Div && is_int_const(b) && b->ival == 1) return a;
  return make(k, Sort::Int, {std::move(a), std::move(b)});
}

ExprPtr compare(ExprKind k, ExprPtr a, ExprPtr b, const char* name) {
  require_sort(a, Sort::Int, name);
  require_sort(b, Sort::Int, name);
  if (is_int_const(a) && is_int_const(b)) {
    long long x = a->ival, y = b->ival;
    switch (k) {
      case ExprKind::Lt: return mk_bool(x < y);
      case ExprKind::Le: return mk_bool(x <= y);
      case ExprKind::Gt: return mk_bool(x > y);
      case ExprKind::Ge: return mk_bool(x >= y);
      case ExprKind::Eq: return mk_bool(x == y);
      case ExprKind::Ne: return mk_bool(x != y);
      default: break;
    }
  }
  return make(k, Sort::Bool, {std::move(a), std::move(b)});
}

}  // namespace

ExprPtr add(ExprPtr a, ExprPtr b) { return arith(ExprKind::Add, std::move(a), std::move(b), "+"); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return arith(ExprKind::Sub, std::move(a), std::move(b), "-"); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return arith(ExprKind::Mul, std::move(a), std::move(b), "*"); }
ExprPtr div_(ExprPtr a, ExprPtr b) { return arith(ExprKind::Div, std::move(a), std::move(b), "/"); }
ExprPtr mod_(ExprPtr a, ExprPtr b) { return arith(ExprKind::Mod, std::move(a), std::move(b), "%"); }
ExprPtr lt(ExprPtr a, ExprPtr b) { return compare(ExprKind::Lt, std::move(a), std::move(b), "<"); }
ExprPtr le(ExprPtr a, ExprPtr b) { return compare(ExprKind::Le, std::move(a), std::move(b), "<="); }
ExprPtr gt(ExprPtr a, ExprPtr b) { return compare(ExprKind::Gt, std::move(a), std::move(b), ">"); }
ExprPtr ge(ExprPtr a, ExprPtr b) { return compare(ExprKind::Ge, std::move(a), std::move(b), ">="); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return compare(ExprKind::Eq, std::move(a), std::move(b), "=="); }
ExprPtr ne(ExprPtr a, ExprPtr b) { return compare(ExprKind::Ne, std::move(a), std::move(b), "!="); }

ExprPtr and_all(std::vector<ExprPtr> conjuncts) {
  std::vector<ExprPtr> flat;
  for (auto& c : conjuncts) {
    require_sort(c, Sort::Bool, "and");
    if (is_bool_const(c)) {
      if (!c->bval) return mk_bool(false);
      continue;  // drop true
    }
    if (c->kind == ExprKind::And)
      flat.insert(flat.end(), c->args.begin(), c->args.end());
    else
      flat.push_back(c);
  }
  if (flat.empty()) return mk_bool(true);
  if (flat.size() == 1) return flat[0];
  return make(ExprKind::And, Sort::Bool, std::move(flat));
}

ExprPtr and_(ExprPtr a, ExprPtr b) { return and_all({std::move(a), std::move(b)}); }

ExprPtr or_(ExprPtr a, ExprPtr b) {
  require_sort(a, Sort::Bool, "or");
  require_sort(b, Sort::Bool, "or");
  if (is_bool_const(a)) return a->bval ? mk_bool(true) : b;
  if (is_bool_const(b)) return b->bval ? mk_bool(true) : a;
  std::vector<ExprPtr> flat;
  for (auto& x : {a, b}) {
    if (x->kind == ExprKind::Or)
      flat.insert(flat.end(), x->args.begin(), x->args.end());
    else
      flat.push_back(x);
  }
  return make(ExprKind::Or, Sort::Bool, std::move(flat));
}

ExprPtr read(ExprPtr array, ExprPtr index) {
  require_sort(array, Sort::Array, "read");
  require_sort(index, Sort::Int, "read index");
  return make(ExprKind::Read, Sort::Int, {std::move(array), std::move(index)});
}

ExprPtr forall_in_range(int param_id, char tag, ExprPtr lo, ExprPtr hi, ExprPtr body) {
  require_sort(lo, Sort::Int, "forall lo");
  require_sort(hi, Sort::Int, "forall hi");
  require_sort(body, Sort::Bool, "forall body");
  auto e = make(ExprKind::Forall, Sort::Bool, {std::move(lo), std::move(hi), std::move(body)});
  Expr& m = const_cast<Expr&>(*e);
  m.param = param_id;
  m.param_tag = tag;
  return e;
}

ExprPtr mk_binary(ExprKind op, ExprPtr a, ExprPtr b) {
  switch (op) {
    case ExprKind::Add: return add(a, b);
    case ExprKind::Sub: return sub(a, b);
    case ExprKind::Mul: return mul(a, b);
    case ExprKind::Div: return div_(a, b);
    case ExprKind::Mod: return mod_(a, b);
    case ExprKind::Lt: return lt(a, b);
    case ExprKind::Le: return le(a, b);
    case ExprKind::Gt: return gt(a, b);
    case ExprKind::Ge: return ge(a, b);
    case ExprKind::Eq: return eq(a, b);
    case ExprKind::Ne: return ne(a, b);
    case ExprKind::And: return and_(a, b);
    case ExprKind::Or: return or_(a, b);
    default: throw SortError("mk_binary: not a binary operator");
  }
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->sort != b->sort) return false;
  switch (a->kind) {
    case ExprKind::IntConst: return a->ival == b->ival;
    case ExprKind::BoolConst: return a->bval == b->bval;
    case ExprKind::Symbol: return a->sym == b->sym;
    case ExprKind::Param: return a->param == b->param;
    case ExprKind::Forall:
      if (a->param != b->param) return false;
      break;
    default: break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

void walk(const ExprPtr& e, const std::function<void(const Expr&)>& f) {
  f(*e);
  for (auto& a : e->args) walk(a, f);
}

void collect_free_params(const ExprPtr& e, std::set<int>& bound, std::set<int>& out) {
  if (e->kind == ExprKind::Param) {
    if (!bound.count(e->param)) out.insert(e->param);
    return;
  }
  if (e->kind == ExprKind::Forall) {
    collect_free_params(e->args[0], bound, out);
    collect_free_params(e->args[1], bound, out);
    bool fresh = bound.insert(e->param).second;
    collect_free_params(e->args[2], bound, out);
    if (fresh) bound.erase(e->param);
    return;
  }
  for (auto& a : e->args) collect_free_params(a, bound, out);
}

}  // namespace

std::set<int> free_params(const ExprPtr& e) {
  std::set<int> bound, out;
  collect_free_params(e, bound, out);
  return out;
}

std::set<int> used_symbols(const ExprPtr& e) {
  std::set<int> out;
  walk(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Symbol) out.insert(x.sym);
  });
  return out;
}

bool contains_params(const ExprPtr& e) {
  if (e->kind == ExprKind::Param) return true;
  if (e->kind == ExprKind::Forall) return true;  // binder is a parameter
  for (auto& a : e->args)
    if (contains_params(a)) return true;
  return false;
}

std::vector<ExprPtr> conjuncts_of(const ExprPtr& e) {
  if (e->kind == ExprKind::And) return e->args;
  if (e->kind == ExprKind::BoolConst && e->bval) return {};
  return {e};
}

namespace {

std::optional<ExprKind> complement_of(ExprKind k) {
  switch (k) {
    case ExprKind::Lt: return ExprKind::Ge;
    case ExprKind::Ge: return ExprKind::Lt;
    case ExprKind::Le: return ExprKind::Gt;
    case ExprKind::Gt: return ExprKind::Le;
    case ExprKind::Eq: return ExprKind::Ne;
    case ExprKind::Ne: return ExprKind::Eq;
    default: return std::nullopt;
  }
}

}  // namespace

bool is_syntactic_negation(const ExprPtr& g1, const ExprPtr& g2) {
  if (g1->kind == ExprKind::Not && structurally_equal(g1->args[0], g2)) return true;
  if (g2->kind == ExprKind::Not && structurally_equal(g2->args[0], g1)) return true;
  if (auto c = complement_of(g1->kind)) {
    if (g2->kind == *c && structurally_equal(g1->args[0], g2->args[0]) &&
        structurally_equal(g1->args[1], g2->args[1]))
      return true;
  }
  return false;
}

namespace {

// Rebuild through the smart constructors so substitution re-folds constants.
ExprPtr rebuild(const Expr& e, std::vector<ExprPtr> args) {
  switch (e.kind) {
    case ExprKind::Neg: return neg(std::move(args[0]));
    case ExprKind::Not: return not_(std::move(args[0]));
    case ExprKind::Read: return read(std::move(args[0]), std::move(args[1]));
    case ExprKind::And: return and_all(std::move(args));
    case ExprKind::Or: {
      ExprPtr acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = or_(acc, args[i]);
      return acc;
    }
    case ExprKind::Forall:
      return forall_in_range(e.param, e.param_tag, std::move(args[0]), std::move(args[1]),
                             std::move(args[2]));
    default: return mk_binary(e.kind, std::move(args[0]), std::move(args[1]));
  }
}

template <typename LeafFn>
ExprPtr transform(const ExprPtr& e, LeafFn&& leaf) {
  if (ExprPtr r = leaf(e)) return r;
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (auto& a : e->args) {
    ExprPtr t = transform(a, leaf);
    changed = changed || t.get() != a.get();
    args.push_back(std::move(t));
  }
  if (!changed) return e;
  return rebuild(*e, std::move(args));
}

}  // namespace

ExprPtr substitute_symbols(const ExprPtr& e, const std::vector<ExprPtr>& by_var_index) {
  return transform(e, [&](const ExprPtr& x) -> ExprPtr {
    if (x->kind != ExprKind::Symbol) return nullptr;
    const ExprPtr& r = by_var_index.at(static_cast<size_t>(x->sym));
    if (r->sort != x->sort)
      throw SortError("substitute_symbols: sort mismatch for variable index " +
                      std::to_string(x->sym));
    return r;
  });
}

ExprPtr substitute_param(const ExprPtr& e, int id, const ExprPtr& value) {
  return substitute_params(e, {{id, value}});
}

ExprPtr substitute_params(const ExprPtr& e,
                          const std::vector<std::pair<int, ExprPtr>>& subst) {
  if (e->kind == ExprKind::Param) {
    for (auto& [id, v] : subst)
      if (id == e->param) return v;
    return e;
  }
  if (e->kind == ExprKind::Forall) {
    // The binder shadows its id inside the body.
    std::vector<std::pair<int, ExprPtr>> inner;
    for (auto& p : subst)
      if (p.first != e->param) inner.push_back(p);
    ExprPtr lo = substitute_params(e->args[0], subst);
    ExprPtr hi = substitute_params(e->args[1], subst);
    ExprPtr body = inner.empty() ? e->args[2] : substitute_params(e->args[2], inner);
    if (lo.get() == e->args[0].get() && hi.get() == e->args[1].get() &&
        body.get() == e->args[2].get())
      return e;
    return forall_in_range(e->param, e->param_tag, lo, hi, body);
  }
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (auto& a : e->args) {
    ExprPtr t = substitute_params(a, subst);
    changed = changed || t.get() != a.get();
    args.push_back(std::move(t));
  }
  if (!changed) return e;
  return rebuild(*e, std::move(args));
}

ExprPtr expand_constant_foralls(const ExprPtr& e, long long limit) {
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (auto& a : e->args) {
    ExprPtr t = expand_constant_foralls(a, limit);
    changed = changed || t.get() != a.get();
    args.push_back(std::move(t));
  }
  if (e->kind == ExprKind::Forall) {
    const ExprPtr& lo = args[0];
    const ExprPtr& hi = args[1];
    if (lo->kind != ExprKind::IntConst || hi->kind != ExprKind::IntConst)
      throw SortError("expand_constant_foralls: non-constant bound");
    long long n = hi->ival - lo->ival;
    if (n > limit) throw SortError("expand_constant_foralls: expansion too wide");
    std::vector<ExprPtr> inst;
    for (long long i = lo->ival; i < hi->ival; ++i) {
      ExprPtr b = substitute_param(args[2], e->param, mk_int(i));
      inst.push_back(expand_constant_foralls(b, limit));
    }
    return and_all(std::move(inst));
  }
  if (!changed) return e;
  return rebuild(*e, std::move(args));
}

// ---- rendering ------------------------------------------------------------

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Forall: return 0;
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Gt:
    case ExprKind::Ge:
    case ExprKind::Eq:
    case ExprKind::Ne: return 3;
    case ExprKind::Add:
    case ExprKind::Sub: return 4;
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Mod: return 5;
    case ExprKind::Neg:
    case ExprKind::Not: return 6;
    default: return 7;
  }
}

const char* op_token(ExprKind k) {
  switch (k) {
    case ExprKind::Add: return "+";
    case ExprKind::Sub: return "-";
    case ExprKind::Mul: return "*";
    case ExprKind::Div: return "/";
    case ExprKind::Mod: return "%";
    case ExprKind::Lt: return "<";
    case ExprKind::Le: return "<=";
    case ExprKind::Gt: return ">";
    case ExprKind::Ge: return ">=";
    case ExprKind::Eq: return "==";
    case ExprKind::Ne: return "!=";
    case ExprKind::And: return "&&";
    case ExprKind::Or: return "||";
    default: return "?";
  }
}

void render(const ExprPtr& e, const std::vector<std::string>& names, bool at,
            std::ostream& os, int parent_prec) {
  int p = precedence(e->kind);
  bool parens = p < parent_prec;
  switch (e->kind) {
    case ExprKind::IntConst:
      if (e->ival < 0 && parent_prec >= 4) {
        os << "(" << e->ival << ")";
        return;
      }
      os << e->ival;
      return;
    case ExprKind::BoolConst: os << (e->bval ? "true" : "false"); return;
    case ExprKind::Symbol:
      if (at) os << '@';
      os << names.at(static_cast<size_t>(e->sym));
      return;
    case ExprKind::Param: os << e->param_tag << e->param; return;
    case ExprKind::Neg:
      os << "-";
      render(e->args[0], names, at, os, 6);
      return;
    case ExprKind::Not:
      os << "!";
      render(e->args[0], names, at, os, 6);
      return;
    case ExprKind::Read:
      render(e->args[0], names, at, os, 7);
      os << "[";
      render(e->args[1], names, at, os, 0);
      os << "]";
      return;
    case ExprKind::Forall:
      if (parens) os << "(";
      os << "forall " << e->param_tag << e->param << " in [";
      render(e->args[0], names, at, os, 0);
      os << ", ";
      render(e->args[1], names, at, os, 0);
      os << ") . ";
      render(e->args[2], names, at, os, 2);
      if (parens) os << ")";
      return;
    case ExprKind::And:
    case ExprKind::Or: {
      if (parens) os << "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << " " << op_token(e->kind) << " ";
        render(e->args[i], names, at, os, p + 1);
      }
      if (parens) os << ")";
      return;
    }
    default: {
      if (parens) os << "(";
      render(e->args[0], names, at, os, p);
      os << " " << op_token(e->kind) << " ";
      render(e->args[1], names, at, os, p + 1);
      if (parens) os << ")";
      return;
    }
  }
}

}  // namespace

std::string render_expr(const ExprPtr& e, const std::vector<std::string>& symbol_names,
                        bool prefix_at) {
  std::ostringstream os;
  render(e, symbol_names, prefix_at, os, 0);
  return os.str();
}

}  // namespace cse
