#pragma once

#include <memory>
#include <vector>

#include "cse/solver.hpp"
#include "cse/symstate.hpp"

namespace cse {

// Oracle for logical equivalence of symbolic expressions. The solver-backed
// implementation batches several obligations into a single query.
class FormulaEquivalence {
 public:
  virtual ~FormulaEquivalence() = default;
  virtual bool equivalent(const ExprPtr& a, const ExprPtr& b) = 0;
  // All pairs equivalent at once; the default loops over equivalent().
  virtual bool all_equivalent(const std::vector<std::pair<ExprPtr, ExprPtr>>& pairs);
};

class SolverEquivalence final : public FormulaEquivalence {
 public:
  SolverEquivalence(SatSolver& solver, std::shared_ptr<const SymbolTable> symtab)
      : solver_(solver), symtab_(std::move(symtab)) {}
  bool equivalent(const ExprPtr& a, const ExprPtr& b) override;
  bool all_equivalent(const std::vector<std::pair<ExprPtr, ExprPtr>>& pairs) override;

 private:
  SatSolver& solver_;
  std::shared_ptr<const SymbolTable> symtab_;
};

enum class EquivMode : uint8_t { Full, GlobalsOnly };

// State equivalence per the definitions: component-wise, with memories
// compared pointwise (restricted to globals and ret variables in GlobalsOnly
// mode), stacks compared record-wise with Wildcard matching any record.
// Both states must be parameter-free.
bool states_equivalent(const Program& p, const ProgramState& s, const ProgramState& s2,
                       EquivMode mode, FormulaEquivalence& eqv);

}  // namespace cse
