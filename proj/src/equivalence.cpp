#include "cse/equivalence.hpp"

#include <cassert>

namespace cse {

bool FormulaEquivalence::all_equivalent(
    const std::vector<std::pair<ExprPtr, ExprPtr>>& pairs) {
  for (auto& [a, b] : pairs)
    if (!equivalent(a, b)) return false;
  return true;
}

bool SolverEquivalence::equivalent(const ExprPtr& a, const ExprPtr& b) {
  return formulas_equivalent(a, b, solver_, symtab_);
}

bool SolverEquivalence::all_equivalent(
    const std::vector<std::pair<ExprPtr, ExprPtr>>& pairs) {
  // One query: some pair differs?
  std::vector<ExprPtr> mismatches;
  for (auto& [a, b] : pairs) {
    if (a->sort != b->sort) return false;
    if (a->sort == Sort::Array) {
      if (!(a->kind == ExprKind::Symbol && b->kind == ExprKind::Symbol && a->sym == b->sym))
        return false;
      continue;
    }
    if (structurally_equal(a, b)) continue;
    if (a->sort == Sort::Bool)
      mismatches.push_back(or_(and_(a, not_(b)), and_(not_(a), b)));
    else
      mismatches.push_back(ne(a, b));
  }
  if (mismatches.empty()) return true;
  ExprPtr any = mismatches[0];
  for (size_t i = 1; i < mismatches.size(); ++i) any = or_(any, mismatches[i]);
  SatResult r = solver_.check(SatQuery::make(any, symtab_), false);
  if (r.verdict == Verdict::Unsat) return true;
  if (r.verdict == Verdict::Sat) return false;
  return solver_.kind() == BackendKind::Bounded;
}

namespace {

bool stacks_equivalent(const Program& p, const CallStack& a, const CallStack& b,
                       std::vector<std::pair<ExprPtr, ExprPtr>>& obligations) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    // Wildcard stands for any record.
    if (std::holds_alternative<Wildcard>(a[i]) || std::holds_alternative<Wildcard>(b[i]))
      continue;
    if (std::holds_alternative<RecMarker>(a[i]) ||
        std::holds_alternative<RecMarker>(b[i])) {
      auto* ma = std::get_if<RecMarker>(&a[i]);
      auto* mb = std::get_if<RecMarker>(&b[i]);
      if (!ma || !mb) return false;
      if (ma->tmpl.get() != mb->tmpl.get() || ma->param != mb->param) return false;
      continue;
    }
    const Frame& fa = std::get<Frame>(a[i]);
    const Frame& fb = std::get<Frame>(b[i]);
    if (fa.return_loc != fb.return_loc) return false;
    if (fa.domain != fb.domain) return false;  // defined for the same variables
    for (size_t j = 0; j < fa.saved.size(); ++j)
      obligations.emplace_back(fa.saved[j], fb.saved[j]);
  }
  (void)p;
  return true;
}

}  // namespace

bool states_equivalent(const Program& p, const ProgramState& s, const ProgramState& s2,
                       EquivMode mode, FormulaEquivalence& eqv) {
  assert(state_parameter_free(s) && state_parameter_free(s2));
  if (s.loc != s2.loc) return false;

  std::vector<std::pair<ExprPtr, ExprPtr>> obligations;
  if (!stacks_equivalent(p, s.xi, s2.xi, obligations)) return false;

  obligations.emplace_back(s.phi, s2.phi);
  if (mode == EquivMode::GlobalsOnly) {
    for (VarId v : global_vars(p)) obligations.emplace_back(s.theta.at(v), s2.theta.at(v));
  } else {
    for (int v = 0; v < s.theta.size(); ++v)
      obligations.emplace_back(s.theta.at(v), s2.theta.at(v));
  }
  return eqv.all_equivalent(obligations);
}

}  // namespace cse
