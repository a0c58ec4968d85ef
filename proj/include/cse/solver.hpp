//===-- solver.hpp - satisfiability backends -------------------------------===//
//
// Two ways to decide boolean symbolic expressions: an external SMT-LIB v2
// solver driven over a child process's stdin/stdout with push/pop framing,
// and an internal bounded-enumeration oracle that exhaustively searches a
// finite domain. Parameters are existentially quantified and range over
// non-negative integers in both backends.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "cse/program.hpp"
#include "cse/symexpr.hpp"

namespace cse {

enum class Verdict : uint8_t { Sat, Unsat, Unknown };
const char* verdict_name(Verdict v);

struct Model {
  std::map<int, long long> ints;   // scalar symbols, by variable index
  std::map<int, bool> bools;
  std::map<int, std::map<long long, long long>> arrays;  // entries; 0 elsewhere
  std::map<int, long long> params;
};

struct SatQuery {
  ExprPtr formula;  // boolean
  std::shared_ptr<const SymbolTable> symtab;
  std::set<int> free_symbols;
  std::set<int> free_parameters;

  static SatQuery make(ExprPtr formula, std::shared_ptr<const SymbolTable> symtab);
};

struct SatResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Model> model;
  std::string backend;
};

struct SolverProcessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedSort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Standalone SMT-LIB v2 script for one query: declarations, the assert, a
// check-sat and get-model.
std::string to_smtlib(const SatQuery& q);

// ---- bounded oracle ---------------------------------------------------------

struct BoundedDomain {
  long long int_lo = -4;
  long long int_hi = 4;
  long long param_max = 3;
  long long array_index_max = 4;  // entries enumerated for indices [0, max]
  unsigned long long assignment_budget = 200000;  // enumeration cap
};

struct DomainTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SatResult check_sat_bounded(const SatQuery& q, const BoundedDomain& d);

// Ground evaluation of a parameter-free, quantifier-free formula under a
// model; array reads outside the model's entries evaluate to 0.
bool eval_ground_bool(const ExprPtr& e, const Model& m);
// Substitutes the model's parameters, expands quantifiers and evaluates.
bool model_satisfies(const ExprPtr& formula, const Model& m);

// ---- backends ----------------------------------------------------------------

enum class BackendKind : uint8_t { External, Bounded, Auto };

class SatSolver {
 public:
  virtual ~SatSolver() = default;
  virtual SatResult check(const SatQuery& q, bool want_model = false) = 0;
  virtual BackendKind kind() const = 0;
  // Fresh declaration namespace; call between unrelated engine runs when a
  // handle is reused.
  virtual void new_session() {}
  virtual uint64_t query_count() const { return 0; }
  virtual uint64_t unknown_count() const { return 0; }
};

class BoundedSolver final : public SatSolver {
 public:
  explicit BoundedSolver(BoundedDomain d) : domain_(d) {}
  SatResult check(const SatQuery& q, bool want_model) override;
  BackendKind kind() const override { return BackendKind::Bounded; }
  uint64_t query_count() const override { return queries_; }

 private:
  BoundedDomain domain_;
  uint64_t queries_ = 0;
};

struct ExternalSolverConfig {
  std::vector<std::string> command;  // argv, argv[0] resolved via PATH
  int timeout_ms = 5000;             // per query; timeout maps to Unknown
  std::string dump_dir;              // when set, scripts are written verbatim
};

// Drives one solver child process; queries are framed with push/pop and
// serialized through this handle.
class SmtProcessSolver final : public SatSolver {
 public:
  explicit SmtProcessSolver(ExternalSolverConfig cfg);
  ~SmtProcessSolver() override;

  SmtProcessSolver(const SmtProcessSolver&) = delete;
  SmtProcessSolver& operator=(const SmtProcessSolver&) = delete;

  SatResult check(const SatQuery& q, bool want_model) override;
  BackendKind kind() const override { return BackendKind::External; }
  void new_session() override;
  uint64_t query_count() const override { return queries_; }
  uint64_t unknown_count() const override { return unknowns_; }

  // Observation hook for differential oracles; sees every query and verdict.
  std::function<void(const SatQuery&, Verdict)> on_query;

 private:
  SatResult check_once(const SatQuery& q, bool want_model);
  struct Impl;
  std::unique_ptr<Impl> impl_;
  uint64_t queries_ = 0;
  uint64_t unknowns_ = 0;
};

// External first; bounded enumeration when the external solver is
// unavailable or answers Unknown.
class AutoSolver final : public SatSolver {
 public:
  AutoSolver(std::shared_ptr<SatSolver> external, BoundedDomain fallback)
      : external_(std::move(external)), bounded_(fallback) {}
  SatResult check(const SatQuery& q, bool want_model) override;
  BackendKind kind() const override { return BackendKind::Auto; }
  void new_session() override { if (external_) external_->new_session(); }
  uint64_t query_count() const override {
    return external_ ? external_->query_count() : 0;
  }
  uint64_t unknown_count() const override {
    return external_ ? external_->unknown_count() : 0;
  }

 private:
  std::shared_ptr<SatSolver> external_;
  BoundedSolver bounded_;
};

// True iff not(a <-> b) is unsatisfiable under the backend; for the bounded
// backend "no counterexample in the domain" counts as equivalent. Numeric
// expressions compare by equality, array expressions by symbol identity.
bool formulas_equivalent(const ExprPtr& a, const ExprPtr& b, SatSolver& backend,
                         const std::shared_ptr<const SymbolTable>& symtab);

// Resolves the external solver command: explicit arg, CSE_SOLVER env var,
// then `z3 -in` if z3 is on PATH. Empty when nothing is found.
std::vector<std::string> resolve_solver_command(const std::string& explicit_cmd = "");
std::vector<std::string> split_command(const std::string& s);

}  // namespace cse
