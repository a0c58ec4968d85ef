//===-- symexpr.hpp - symbolic expression trees ---------------------------===//
//
// Immutable symbolic expressions over input symbols, iteration parameters,
// integer/boolean constants, arithmetic/logic operators, array reads and
// bounded universal quantification. Construction goes through the smart
// builders below, which fold constants and flatten conjunctions; everything
// beyond that (logical equivalence) is the solver's job.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cse {

enum class Sort : uint8_t { Int, Bool, Array };

const char* sort_name(Sort s);

struct SortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExprKind : uint8_t {
  IntConst,
  BoolConst,
  Symbol,  // input symbol for one program variable (alpha_i)
  Param,   // iteration parameter (kappa/tau), ranges over non-negative ints
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,  // SMT-LIB Int division (Euclidean)
  Mod,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,  // n-ary, flattened
  Or,   // n-ary, flattened
  Read,    // args[0] = array-sorted expr, args[1] = index
  Forall,  // bounded: forall param in [args[0], args[1]) -> args[2]
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  Sort sort;
  long long ival = 0;  // IntConst
  bool bval = false;   // BoolConst
  int sym = -1;        // Symbol: variable index
  int param = -1;      // Param and Forall binder
  char param_tag = 'k';
  std::vector<ExprPtr> args;
};

// ---- builders -------------------------------------------------------------

ExprPtr mk_int(long long v);
ExprPtr mk_bool(bool b);
ExprPtr mk_symbol(int var_index, Sort sort);
ExprPtr mk_param(int id, char tag = 'k');

ExprPtr neg(ExprPtr e);
ExprPtr not_(ExprPtr e);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div_(ExprPtr a, ExprPtr b);
ExprPtr mod_(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr le(ExprPtr a, ExprPtr b);
ExprPtr gt(ExprPtr a, ExprPtr b);
ExprPtr ge(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr ne(ExprPtr a, ExprPtr b);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr and_all(std::vector<ExprPtr> conjuncts);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr read(ExprPtr array, ExprPtr index);
ExprPtr forall_in_range(int param_id, char tag, ExprPtr lo, ExprPtr hi, ExprPtr body);

// Generic binary dispatch, used by the parser and the ground evaluator.
ExprPtr mk_binary(ExprKind op, ExprPtr a, ExprPtr b);

// ---- queries --------------------------------------------------------------

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Free parameters (binder occurrences excluded).
std::set<int> free_params(const ExprPtr& e);
// Variable indices of all symbols occurring in e (array symbols included).
std::set<int> used_symbols(const ExprPtr& e);
bool contains_params(const ExprPtr& e);

// Conjuncts of a flattened conjunction (the expression itself if not an And).
std::vector<ExprPtr> conjuncts_of(const ExprPtr& e);

// gamma2 is the syntactic negation of gamma1: either a literal Not of the
// other operand, or the complementary comparison over identical operands
// (< vs >=, <= vs >, == vs !=).
bool is_syntactic_negation(const ExprPtr& g1, const ExprPtr& g2);

// ---- substitution ---------------------------------------------------------

// Replace every Symbol node by lookup(var_index); lookup must return an
// expression of the symbol's sort. Parameters are untouched.
ExprPtr substitute_symbols(const ExprPtr& e,
                           const std::vector<ExprPtr>& by_var_index);

// Replace the free parameter `id` by `value` (binders shadow as usual).
ExprPtr substitute_param(const ExprPtr& e, int id, const ExprPtr& value);

// Substitute several free parameters at once.
ExprPtr substitute_params(const ExprPtr& e,
                          const std::vector<std::pair<int, ExprPtr>>& subst);

// Expand every bounded Forall whose bounds are integer constants into the
// finite conjunction of its instances. Throws SortError if a bound is not
// constant. `limit` caps the expansion width.
ExprPtr expand_constant_foralls(const ExprPtr& e, long long limit = 10000);

// ---- rendering ------------------------------------------------------------

// Infix rendering with minimal parentheses. `symbol_names[i]` names variable
// i; when prefix_at is set, symbols render as "@name" (symbolic values),
// otherwise as plain names (program expressions).
std::string render_expr(const ExprPtr& e, const std::vector<std::string>& symbol_names,
                        bool prefix_at = true);

// Euclidean division/modulo, matching SMT-LIB Int semantics.
long long euclid_div(long long a, long long b);
long long euclid_mod(long long a, long long b);

}  // namespace cse
