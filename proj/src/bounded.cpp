#include <algorithm>
#include <cstdlib>

#include "cse/solver.hpp"

namespace cse {

namespace {

struct GroundValue {
  bool is_bool;
  long long i = 0;
  bool b = false;
};

GroundValue eval_ground(const ExprPtr& e, const Model& m) {
  switch (e->kind) {
    case ExprKind::IntConst: return {false, e->ival, false};
    case ExprKind::BoolConst: return {true, 0, e->bval};
    case ExprKind::Symbol: {
      if (e->sort == Sort::Int) {
        auto it = m.ints.find(e->sym);
        return {false, it == m.ints.end() ? 0 : it->second, false};
      }
      if (e->sort == Sort::Bool) {
        auto it = m.bools.find(e->sym);
        return {true, 0, it != m.bools.end() && it->second};
      }
      throw SortError("array symbol evaluated outside a read");
    }
    case ExprKind::Param: {
      auto it = m.params.find(e->param);
      if (it == m.params.end())
        throw SortError("unsubstituted parameter in ground evaluation");
      return {false, it->second, false};
    }
    case ExprKind::Neg: return {false, -eval_ground(e->args[0], m).i, false};
    case ExprKind::Not: return {true, 0, !eval_ground(e->args[0], m).b};
    case ExprKind::Read: {
      long long idx = eval_ground(e->args[1], m).i;
      auto it = m.arrays.find(e->args[0]->sym);
      if (it != m.arrays.end()) {
        auto jt = it->second.find(idx);
        if (jt != it->second.end()) return {false, jt->second, false};
      }
      return {false, 0, false};
    }
    case ExprKind::Forall:
      throw SortError("quantifier in ground evaluation; expand first");
    case ExprKind::And: {
      for (auto& a : e->args)
        if (!eval_ground(a, m).b) return {true, 0, false};
      return {true, 0, true};
    }
    case ExprKind::Or: {
      for (auto& a : e->args)
        if (eval_ground(a, m).b) return {true, 0, true};
      return {true, 0, false};
    }
    default: break;
  }
  long long a = eval_ground(e->args[0], m).i;
  long long b = eval_ground(e->args[1], m).i;
  switch (e->kind) {
    case ExprKind::Add: return {false, a + b, false};
    case ExprKind::Sub: return {false, a - b, false};
    case ExprKind::Mul: return {false, a * b, false};
    case ExprKind::Div: return {false, b == 0 ? 0 : euclid_div(a, b), false};
    case ExprKind::Mod: return {false, b == 0 ? 0 : euclid_mod(a, b), false};
    case ExprKind::Lt: return {true, 0, a < b};
    case ExprKind::Le: return {true, 0, a <= b};
    case ExprKind::Gt: return {true, 0, a > b};
    case ExprKind::Ge: return {true, 0, a >= b};
    case ExprKind::Eq: return {true, 0, a == b};
    case ExprKind::Ne: return {true, 0, a != b};
    default: throw SortError("unexpected node in ground evaluation");
  }
}

void collect_read_slots(const ExprPtr& e, const Model& scalars,
                        std::vector<std::pair<int, long long>>& out) {
  if (e->kind == ExprKind::Read) {
    long long idx = eval_ground(e->args[1], scalars).i;
    std::pair<int, long long> slot{e->args[0]->sym, idx};
    if (std::find(out.begin(), out.end(), slot) == out.end()) out.push_back(slot);
  }
  for (auto& a : e->args) collect_read_slots(a, scalars, out);
}

bool has_nested_read(const ExprPtr& e, bool inside_index = false) {
  if (e->kind == ExprKind::Read) {
    if (inside_index) return true;
    return has_nested_read(e->args[1], true);
  }
  for (auto& a : e->args)
    if (has_nested_read(a, inside_index)) return true;
  return false;
}

// Small magnitudes first so satisfiable queries exit early.
std::vector<long long> ordered_range(long long lo, long long hi) {
  std::vector<long long> out;
  long long span = std::max(std::llabs(lo), std::llabs(hi));
  for (long long d = 0; d <= span; ++d) {
    if (d >= lo && d <= hi) out.push_back(d);
    if (d > 0 && -d >= lo && -d <= hi) out.push_back(-d);
  }
  return out;
}

// Mixed-radix odometer; false once all combinations are exhausted.
bool advance(std::vector<size_t>& idx, const std::vector<size_t>& radix) {
  for (size_t k = 0; k < idx.size(); ++k) {
    if (++idx[k] < radix[k]) return true;
    idx[k] = 0;
  }
  return false;
}

}  // namespace

bool eval_ground_bool(const ExprPtr& e, const Model& m) {
  GroundValue v = eval_ground(e, m);
  if (!v.is_bool) throw SortError("formula evaluated to a numeric value");
  return v.b;
}

bool model_satisfies(const ExprPtr& formula, const Model& m) {
  std::vector<std::pair<int, ExprPtr>> subst;
  for (auto& [p, v] : m.params) subst.emplace_back(p, mk_int(v));
  ExprPtr f = subst.empty() ? formula : substitute_params(formula, subst);
  f = expand_constant_foralls(f);
  return eval_ground_bool(f, m);
}

SatResult check_sat_bounded(const SatQuery& q, const BoundedDomain& d) {
  if (has_nested_read(q.formula))
    throw DomainTooLarge("nested array reads are outside the bounded domain");

  const std::vector<int> params(q.free_parameters.begin(), q.free_parameters.end());
  std::vector<int> int_syms, bool_syms;
  for (int s : q.free_symbols) {
    switch ((*q.symtab)[s].sort) {
      case Sort::Int: int_syms.push_back(s); break;
      case Sort::Bool: bool_syms.push_back(s); break;
      case Sort::Array: break;  // enumerated per read slot below
    }
  }

  const std::vector<long long> values = ordered_range(d.int_lo, d.int_hi);
  if (values.empty()) throw DomainTooLarge("empty integer range");
  unsigned long long budget = d.assignment_budget;

  Model m;
  std::vector<size_t> pidx(params.size(), 0);
  std::vector<size_t> pradix(params.size(), static_cast<size_t>(d.param_max) + 1);

  do {
    m.params.clear();
    for (size_t i = 0; i < params.size(); ++i)
      m.params[params[i]] = static_cast<long long>(pidx[i]);
    ExprPtr expanded;
    {
      std::vector<std::pair<int, ExprPtr>> subst;
      for (auto& [p, v] : m.params) subst.emplace_back(p, mk_int(v));
      ExprPtr f = subst.empty() ? q.formula : substitute_params(q.formula, subst);
      expanded = expand_constant_foralls(f);
    }
    if (expanded->kind == ExprKind::BoolConst && !expanded->bval) continue;

    std::vector<size_t> sidx(int_syms.size() + bool_syms.size(), 0);
    std::vector<size_t> sradix;
    for (size_t i = 0; i < int_syms.size(); ++i) sradix.push_back(values.size());
    for (size_t i = 0; i < bool_syms.size(); ++i) sradix.push_back(2);

    do {
      m.ints.clear();
      m.bools.clear();
      for (size_t i = 0; i < int_syms.size(); ++i) m.ints[int_syms[i]] = values[sidx[i]];
      for (size_t i = 0; i < bool_syms.size(); ++i)
        m.bools[bool_syms[i]] = sidx[int_syms.size() + i] != 0;

      std::vector<std::pair<int, long long>> slots;
      collect_read_slots(expanded, m, slots);
      // Reads outside the index window are pinned to 0; in-window slots are
      // enumerated.
      std::vector<std::pair<int, long long>> free_slots;
      for (auto& s : slots)
        if (s.second >= 0 && s.second <= d.array_index_max) free_slots.push_back(s);

      std::vector<size_t> aidx(free_slots.size(), 0);
      std::vector<size_t> aradix(free_slots.size(), values.size());
      do {
        if (budget-- == 0) throw DomainTooLarge("bounded enumeration budget exceeded");
        m.arrays.clear();
        for (auto& s : slots) m.arrays[s.first][s.second] = 0;
        for (size_t i = 0; i < free_slots.size(); ++i)
          m.arrays[free_slots[i].first][free_slots[i].second] = values[aidx[i]];
        if (eval_ground_bool(expanded, m)) {
          SatResult r;
          r.verdict = Verdict::Sat;
          r.model = m;
          r.backend = "bounded";
          return r;
        }
      } while (advance(aidx, aradix));
    } while (advance(sidx, sradix));
  } while (advance(pidx, pradix));

  SatResult r;
  r.verdict = Verdict::Unknown;
  r.backend = "bounded";
  return r;
}

SatResult BoundedSolver::check(const SatQuery& q, bool) {
  ++queries_;
  return check_sat_bounded(q, domain_);
}

}  // namespace cse
